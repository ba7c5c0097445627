"""Exact numbers: rationals, cyclotomic field elements, framed rationals, Gamma ratios.

Rationals are :class:`fractions.Fraction` throughout. :class:`Cyclotomic`
represents an element of Q(zeta) for zeta = exp(2 pi i / order) in the power
basis reduced modulo the cyclotomic polynomial, so equality is exact
coordinate comparison.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from numbers import Rational as _RationalABC

from .errors import NotIntegerShift, OrderMismatch, PoleError

Rational = Fraction

__all__ = [
    "Rational",
    "Cyclotomic",
    "FramedRational",
    "as_rational",
    "format_rational",
    "parse_rational",
    "cyclotomic_polynomial",
    "root_of_unity",
    "cyc_add",
    "cyc_mul",
    "gamma_ratio",
    "gamma_float",
    "LANCZOS_G",
    "LANCZOS_COEFFICIENTS",
]


def as_rational(x) -> Fraction:
    """Coerce ints, Fractions and "p/q" strings to Fraction. Floats are refused."""
    if isinstance(x, Fraction):
        return x
    if isinstance(x, bool):
        raise TypeError("bool is not a rational")
    if isinstance(x, (int, _RationalABC)):
        return Fraction(x)
    if isinstance(x, str):
        return parse_rational(x)
    raise TypeError(f"cannot interpret {x!r} as an exact rational")


def parse_rational(text: str) -> Fraction:
    text = text.strip()
    if not text:
        raise ValueError("empty rational")
    num, sep, den = text.partition("/")
    try:
        p = int(num)
        q = int(den) if sep else 1
    except ValueError:
        raise ValueError(f"malformed rational {text!r}") from None
    if q == 0:
        raise ZeroDivisionError(f"zero denominator in {text!r}")
    return Fraction(p, q)


def format_rational(r) -> str:
    r = as_rational(r)
    if r.denominator == 1:
        return str(r.numerator)
    return f"{r.numerator}/{r.denominator}"


# ---------------------------------------------------------------------------
# Cyclotomic field


def _polymul(a, b):
    out = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                out[i + j] += x * y
    return out


def _polydiv_exact(num, den):
    # den is monic with integer coefficients; division is exact by construction
    num = list(num)
    d = len(den) - 1
    quot = [0] * (len(num) - d)
    for k in range(len(num) - 1, d - 1, -1):
        c = num[k]
        if c:
            quot[k - d] = c
            for j, y in enumerate(den):
                num[k - d + j] -= c * y
    if any(num[:d]):
        raise ArithmeticError("inexact polynomial division")
    return quot


@lru_cache(maxsize=None)
def cyclotomic_polynomial(n: int) -> tuple[int, ...]:
    """Integer coefficients of the n-th cyclotomic polynomial, constant term first."""
    if n < 1:
        raise ValueError("order must be positive")
    poly = [-1] + [0] * (n - 1) + [1]  # x^n - 1
    for d in range(1, n):
        if n % d == 0:
            poly = _polydiv_exact(poly, cyclotomic_polynomial(d))
    return tuple(poly)


@lru_cache(maxsize=None)
def _power_table(order: int) -> tuple[tuple[Fraction, ...], ...]:
    """Coordinates of zeta^k for k in [0, 2*degree - 1) and k < order."""
    phi = cyclotomic_polynomial(order)
    deg = len(phi) - 1
    table = []
    cur = [Fraction(0)] * deg
    cur[0] = Fraction(1)
    for _ in range(max(order, 2 * deg - 1)):
        table.append(tuple(cur))
        # multiply by zeta: shift, then fold x^deg = -sum(phi[i] x^i)
        top = cur[-1]
        cur = [Fraction(0)] + cur[:-1]
        if top:
            for i in range(deg):
                cur[i] -= top * phi[i]
    return tuple(table)


class Cyclotomic:
    """Element of Q(zeta_order) as coordinates over 1, zeta, ..., zeta^(d-1)."""

    __slots__ = ("order", "coords")

    def __init__(self, order: int, coords):
        order = int(order)
        deg = len(cyclotomic_polynomial(order)) - 1
        coords = tuple(as_rational(c) for c in coords)
        if len(coords) > deg:
            # reduce an arbitrary polynomial in zeta
            table = _power_table(order)
            acc = [Fraction(0)] * deg
            for k, c in enumerate(coords):
                if c:
                    row = table[k] if k < len(table) else _zeta_power_coords(order, k)
                    for i in range(deg):
                        acc[i] += c * row[i]
            coords = tuple(acc)
        elif len(coords) < deg:
            coords = coords + (Fraction(0),) * (deg - len(coords))
        object.__setattr__(self, "order", order)
        object.__setattr__(self, "coords", coords)

    def __setattr__(self, name, value):
        raise AttributeError("Cyclotomic is immutable")

    def __reduce__(self):
        return (Cyclotomic, (self.order, self.coords))

    @classmethod
    def zero(cls, order: int) -> Cyclotomic:
        return cls(order, ())

    @classmethod
    def one(cls, order: int) -> Cyclotomic:
        return cls(order, (1,))

    @classmethod
    def from_rational(cls, r, order: int) -> Cyclotomic:
        return cls(order, (as_rational(r),))

    @classmethod
    def zeta_power(cls, k: int, order: int) -> Cyclotomic:
        return cls(order, _zeta_power_coords(order, k))

    @property
    def degree(self) -> int:
        return len(self.coords)

    def is_zero(self) -> bool:
        return not any(self.coords)

    def __bool__(self):
        return not self.is_zero()

    def _check(self, other: Cyclotomic):
        if other.order != self.order:
            raise OrderMismatch(f"orders differ: {self.order} vs {other.order}")

    def __add__(self, other):
        if isinstance(other, Cyclotomic):
            self._check(other)
            return Cyclotomic(self.order, tuple(a + b for a, b in zip(self.coords, other.coords)))
        try:
            r = as_rational(other)
        except TypeError:
            return NotImplemented
        return Cyclotomic(self.order, (self.coords[0] + r,) + self.coords[1:])

    __radd__ = __add__

    def __neg__(self):
        return Cyclotomic(self.order, tuple(-a for a in self.coords))

    def __sub__(self, other):
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, Cyclotomic):
            self._check(other)
            conv = [Fraction(0)] * (2 * self.degree - 1)
            for i, a in enumerate(self.coords):
                if a:
                    for j, b in enumerate(other.coords):
                        if b:
                            conv[i + j] += a * b
            return Cyclotomic(self.order, conv)
        try:
            r = as_rational(other)
        except TypeError:
            return NotImplemented
        return Cyclotomic(self.order, tuple(a * r for a in self.coords))

    __rmul__ = __mul__

    def __pow__(self, k: int):
        if not isinstance(k, int) or k < 0:
            raise ValueError("only nonnegative integer powers are supported")
        result, base = Cyclotomic.one(self.order), self
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    def __eq__(self, other):
        if isinstance(other, Cyclotomic):
            return self.order == other.order and self.coords == other.coords
        try:
            r = as_rational(other)
        except TypeError:
            return NotImplemented
        return self.coords[0] == r and not any(self.coords[1:])

    def __hash__(self):
        return hash((self.order, self.coords))

    def embed(self) -> complex:
        """Numerical value under zeta -> exp(2 pi i / order)."""
        z = cmath.exp(2j * math.pi / self.order)
        return sum((float(c) * z**i for i, c in enumerate(self.coords) if c), 0j)

    def to_json(self) -> dict:
        return {"order": self.order, "coords": [format_rational(c) for c in self.coords]}

    @classmethod
    def from_json(cls, data) -> Cyclotomic:
        return cls(int(data["order"]), [parse_rational(c) for c in data["coords"]])

    def __repr__(self):
        parts = []
        for i, c in enumerate(self.coords):
            if not c:
                continue
            mono = "" if i == 0 else ("z" if i == 1 else f"z^{i}")
            if not mono:
                parts.append(format_rational(c))
            elif c == 1:
                parts.append(mono)
            else:
                parts.append(f"({format_rational(c)})*{mono}")
        body = " + ".join(parts) if parts else "0"
        return f"Cyclotomic[{self.order}]({body})"


def _zeta_power_coords(order: int, k: int) -> tuple[Fraction, ...]:
    return _power_table(order)[k % order]


def cyc_add(x: Cyclotomic, y: Cyclotomic) -> Cyclotomic:
    return x + y


def cyc_mul(x: Cyclotomic, y: Cyclotomic) -> Cyclotomic:
    return x * y


def root_of_unity(p: int, q: int, order: int) -> Cyclotomic:
    """Exact exp(i*pi*p/q) as an element of Q(zeta_order), order = 2N with q | N."""
    if q <= 0:
        raise ValueError("q must be positive")
    if order % 2:
        raise OrderMismatch(f"order {order} is not of the form 2N")
    n = order // 2
    if n % q:
        raise OrderMismatch(f"{q} does not divide {n}")
    return Cyclotomic.zeta_power(p * (n // q), order)


# ---------------------------------------------------------------------------
# Framing-affine rationals


@dataclass(frozen=True)
class FramedRational:
    """The value ``c0 + c1 * phi`` for a not-yet-bound framing symbol phi."""

    c0: Fraction = Fraction(0)
    c1: Fraction = Fraction(0)

    def __post_init__(self):
        object.__setattr__(self, "c0", as_rational(self.c0))
        object.__setattr__(self, "c1", as_rational(self.c1))

    @classmethod
    def coerce(cls, x) -> FramedRational:
        if isinstance(x, FramedRational):
            return x
        return cls(as_rational(x), Fraction(0))

    @property
    def is_framing_free(self) -> bool:
        return self.c1 == 0

    def is_zero(self) -> bool:
        return self.c0 == 0 and self.c1 == 0

    def __add__(self, other):
        other = FramedRational.coerce(other)
        return FramedRational(self.c0 + other.c0, self.c1 + other.c1)

    __radd__ = __add__

    def __neg__(self):
        return FramedRational(-self.c0, -self.c1)

    def __sub__(self, other):
        return self + (-FramedRational.coerce(other))

    def __mul__(self, other):
        if isinstance(other, FramedRational):
            if other.c1 and self.c1:
                raise TypeError("product of two framing-dependent values is not affine")
            if other.c1:
                return other * self.c0
            other = other.c0
        r = as_rational(other)
        return FramedRational(self.c0 * r, self.c1 * r)

    __rmul__ = __mul__

    def substitute(self, framing) -> Fraction:
        return self.c0 + self.c1 * as_rational(framing)

    def reparametrize(self, alpha, beta) -> FramedRational:
        """Rewrite in terms of phi' where phi = alpha * phi' + beta."""
        alpha, beta = as_rational(alpha), as_rational(beta)
        return FramedRational(self.c0 + self.c1 * beta, self.c1 * alpha)

    def to_json(self) -> dict:
        return {"c0": format_rational(self.c0), "c1": format_rational(self.c1)}

    def __str__(self):
        if not self.c1:
            return format_rational(self.c0)
        if not self.c0:
            return f"({format_rational(self.c1)})*f"
        return f"{format_rational(self.c0)} + ({format_rational(self.c1)})*f"


# ---------------------------------------------------------------------------
# Gamma


def gamma_ratio(a, b) -> Fraction:
    """Gamma(a) / Gamma(b) for rationals with integer difference.

    A nonnegative shift gives the rising factorial (b)_n, which is the correct
    limit 0 when Gamma(b) has a pole. A negative shift with a zero factor means
    Gamma(a) has an uncancelled pole and raises :class:`PoleError`.
    """
    a, b = as_rational(a), as_rational(b)
    diff = a - b
    if diff.denominator != 1:
        raise NotIntegerShift(f"{a} - {b} is not an integer")
    n = diff.numerator
    prod = Fraction(1)
    if n >= 0:
        for j in range(n):
            prod *= b + j
        return prod
    for j in range(-n):
        factor = a + j
        if factor == 0:
            raise PoleError(f"Gamma({a}) pole is not cancelled by Gamma({b})")
        prod *= factor
    return 1 / prod


LANCZOS_G = 7
LANCZOS_COEFFICIENTS = (
    0.99999999999980993,
    676.5203681218851,
    -1259.1392167224028,
    771.32342877765313,
    -176.61502916214059,
    12.507343278686905,
    -0.13857109526572012,
    9.9843695780195716e-6,
    1.5056327351493116e-7,
)


def gamma_float(x: float) -> float:
    """Floating Gamma via the Lanczos approximation (g=7, n=9) and reflection.

    Independent of :func:`gamma_ratio`; used only as a numerical oracle.
    """
    x = float(x)
    if x <= 0 and x == math.floor(x):
        raise PoleError(f"Gamma pole at {x}")
    if x < 0.5:
        # reduce the sine argument first to keep it accurate for large |x|
        r = x - 2.0 * round(x / 2.0)
        return math.pi / (math.sin(math.pi * r) * gamma_float(1.0 - x))
    coef = LANCZOS_COEFFICIENTS
    x -= 1.0
    acc = coef[0]
    for i in range(1, len(coef)):
        acc += coef[i] / (x + i)
    t = x + LANCZOS_G + 0.5
    half = t ** ((x + 0.5) / 2.0)
    return math.sqrt(2.0 * math.pi) * half * (half * math.exp(-t)) * acc
