"""Sparse Puiseux-type series with rational exponents and cyclotomic coefficients."""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Mapping

from .errors import OrderMismatch, RegionMismatch, UnknownVariable
from .exactnum import Cyclotomic, as_rational, format_rational, parse_rational


class Monomial:
    """Product of variables raised to rational powers; zero powers are never stored."""

    __slots__ = ("_key",)

    def __init__(self, exponents: Mapping[str, object] | Iterable = ()):
        items = exponents.items() if isinstance(exponents, Mapping) else exponents
        key = []
        for var, e in items:
            e = as_rational(e)
            if e:
                key.append((str(var), e))
        key.sort()
        names = [v for v, _ in key]
        if len(set(names)) != len(names):
            raise ValueError(f"repeated variable in monomial: {names}")
        object.__setattr__(self, "_key", tuple(key))

    def __setattr__(self, name, value):
        raise AttributeError("Monomial is immutable")

    def __reduce__(self):
        return (Monomial, (self._key,))

    @property
    def exponents(self) -> dict[str, Fraction]:
        return dict(self._key)

    @property
    def variables(self) -> tuple[str, ...]:
        return tuple(v for v, _ in self._key)

    def degree_in(self, var: str) -> Fraction:
        return dict(self._key).get(var, Fraction(0))

    def __mul__(self, other: Monomial) -> Monomial:
        exps = self.exponents
        for v, e in other._key:
            exps[v] = exps.get(v, Fraction(0)) + e
        return Monomial(exps)

    def __eq__(self, other):
        return isinstance(other, Monomial) and self._key == other._key

    def __lt__(self, other: Monomial):
        return self._key < other._key

    def __hash__(self):
        return hash(self._key)

    def to_json(self) -> dict:
        return {v: format_rational(e) for v, e in self._key}

    @classmethod
    def from_json(cls, data) -> Monomial:
        return cls({v: parse_rational(e) for v, e in data.items()})

    def __str__(self):
        if not self._key:
            return "1"
        return "*".join(v if e == 1 else f"{v}^({format_rational(e)})" for v, e in self._key)

    def __repr__(self):
        return f"Monomial({self})"


@dataclass(frozen=True)
class Region:
    """Truncation descriptor: brane-index bound and the variable set."""

    m0_max: int
    variables: frozenset = frozenset()

    def to_json(self):
        return {"m0_max": self.m0_max, "variables": sorted(self.variables)}


class PuiseuxSeries:
    """Finite sparse sum of monomials with Cyclotomic coefficients of one order.

    Treated as immutable once built; ``collisions`` counts coefficient merges
    that happened while the series was produced (e.g. by :func:`substitute`).
    """

    def __init__(self, terms: Mapping[Monomial, Cyclotomic] | Iterable = (), order: int = 2,
                 region: Region | None = None, collisions: int = 0):
        self.order = int(order)
        self._terms: dict[Monomial, Cyclotomic] = {}
        items = terms.items() if isinstance(terms, Mapping) else terms
        for mono, coeff in items:
            if coeff.order != self.order:
                raise OrderMismatch(f"coefficient order {coeff.order} != series order {self.order}")
            if mono in self._terms:
                collisions += 1
                coeff = self._terms[mono] + coeff
            self._terms[mono] = coeff
        self._terms = {m: c for m, c in self._terms.items() if not c.is_zero()}
        self.region = region if region is not None else Region(0, frozenset())
        self.collisions = collisions

    @property
    def terms(self) -> dict[Monomial, Cyclotomic]:
        return dict(self._terms)

    def __len__(self):
        return len(self._terms)

    def __iter__(self):
        return iter(sorted(self._terms))

    def items(self):
        return [(m, self._terms[m]) for m in sorted(self._terms)]

    def coefficient(self, mono: Monomial) -> Cyclotomic:
        return self._terms.get(mono, Cyclotomic.zero(self.order))

    def __eq__(self, other):
        return (
            isinstance(other, PuiseuxSeries)
            and self.order == other.order
            and self._terms == other._terms
        )

    def to_json(self) -> list:
        return [{"monomial": m.to_json(), "coeff": c.to_json()} for m, c in self.items()]

    @classmethod
    def from_json(cls, data, region: Region | None = None, order: int | None = None) -> PuiseuxSeries:
        terms = [(Monomial.from_json(t["monomial"]), Cyclotomic.from_json(t["coeff"])) for t in data]
        if order is None:
            order = terms[0][1].order if terms else 2
        return cls(terms, order, region)

    def __repr__(self):
        head = " + ".join(f"{c!r}*{m}" for m, c in self.items()[:4])
        more = f" + ... ({len(self)} terms)" if len(self) > 4 else ""
        return f"PuiseuxSeries({head or '0'}{more})"


@dataclass
class DiffReport:
    mismatches: list = field(default_factory=list)
    left_only: list = field(default_factory=list)
    right_only: list = field(default_factory=list)
    matched: int = 0

    @property
    def empty(self) -> bool:
        return not (self.mismatches or self.left_only or self.right_only)

    @property
    def total(self) -> int:
        return len(self.mismatches) + len(self.left_only) + len(self.right_only)

    def to_json(self, limit: int | None = None) -> dict:
        cut = (lambda xs: xs[:limit]) if limit is not None else (lambda xs: xs)
        return {
            "matched": self.matched,
            "total_differences": self.total,
            "mismatches": [
                {"monomial": m.to_json(), "left": a.to_json(), "right": b.to_json()}
                for m, a, b in cut(self.mismatches)
            ],
            "left_only": [m.to_json() for m in cut(self.left_only)],
            "right_only": [m.to_json() for m in cut(self.right_only)],
            "truncated": limit is not None and self.total > 0 and any(
                len(xs) > limit for xs in (self.mismatches, self.left_only, self.right_only)
            ),
        }


def substitute(s: PuiseuxSeries, cov) -> PuiseuxSeries:
    """Apply a monomial change of variables; colliding images are summed."""
    src = set(cov.source_vars)
    out = []
    for mono, coeff in s.items():
        extra = set(mono.variables) - src
        if extra:
            raise UnknownVariable(f"variables {sorted(extra)} not in change of variables")
        out.append((Monomial(cov.image(mono.exponents)), coeff))
    region = Region(s.region.m0_max, frozenset(cov.target_vars))
    return PuiseuxSeries(out, s.order, region, collisions=s.collisions)


def scale(s: PuiseuxSeries, c) -> PuiseuxSeries:
    c = as_rational(c)
    return PuiseuxSeries(
        [(m, coeff * c) for m, coeff in s.items()], s.order, s.region, collisions=s.collisions
    )


def compare(a: PuiseuxSeries, b: PuiseuxSeries) -> DiffReport:
    """Exact term-by-term comparison over an aligned truncation region."""
    if a.region != b.region:
        raise RegionMismatch(f"regions differ: {a.region} vs {b.region}")
    if a.order != b.order and len(a) and len(b):
        raise OrderMismatch(f"coefficient orders differ: {a.order} vs {b.order}")
    report = DiffReport()
    ta, tb = a._terms, b._terms
    for m in sorted(ta.keys() | tb.keys()):
        if m not in tb:
            report.left_only.append(m)
        elif m not in ta:
            report.right_only.append(m)
        elif ta[m] != tb[m]:
            report.mismatches.append((m, ta[m], tb[m]))
        else:
            report.matched += 1
    return report
