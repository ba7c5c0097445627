"""Extended charge vectors and the exact linear algebra relating two of them.

Two charge systems (orbifold and resolution side) are related by a rational
transition matrix ``T`` with ``src = T @ tgt`` once the source framing is
rewritten as an affine function of the target framing. ``T`` also gives the
monomial change of variables between the two superpotentials.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

from .errors import NoFramingRelation, NonConstantRatio, NonInteger, RankMismatch, WrongRank
from .exactnum import FramedRational, as_rational, format_rational


# ---------------------------------------------------------------------------
# Small exact linear algebra over Q


def rref(rows):
    """Reduced row echelon form of a rational matrix. Returns (matrix, pivot columns)."""
    m = [[as_rational(x) for x in row] for row in rows]
    if not m:
        return m, []
    n_cols = len(m[0])
    pivots = []
    r = 0
    for c in range(n_cols):
        p = next((i for i in range(r, len(m)) if m[i][c] != 0), None)
        if p is None:
            continue
        m[r], m[p] = m[p], m[r]
        inv = 1 / m[r][c]
        m[r] = [x * inv if x else x for x in m[r]]
        for i in range(len(m)):
            if i != r and m[i][c] != 0:
                f = m[i][c]
                m[i] = [x - f * y if y else x for x, y in zip(m[i], m[r])]
        pivots.append(c)
        r += 1
        if r == len(m):
            break
    return m, pivots


def rank(rows) -> int:
    return len(rref(rows)[1])


def solve(a, b):
    """Solve ``a @ x = b`` exactly.

    Returns the unique solution, or None when inconsistent. Raises
    ValueError when the solution is not unique.
    """
    n = len(a[0]) if a else 0
    aug = [list(row) + [bi] for row, bi in zip(a, b)]
    red, piv = rref(aug)
    if n in piv:
        return None
    if len(piv) < n:
        raise ValueError("underdetermined system")
    return [red[i][n] for i in range(n)]


def matmul(a, b):
    return [[sum((x * y for x, y in zip(row, col)), Fraction(0)) for col in zip(*b)] for row in a]


def identity(n):
    return [[Fraction(int(i == j)) for j in range(n)] for i in range(n)]


def inverse(a):
    n = len(a)
    red, piv = rref([list(row) + e for row, e in zip(a, identity(n))])
    if piv[:n] != list(range(n)):
        raise ValueError("matrix is singular")
    return [row[n:] for row in red]


# ---------------------------------------------------------------------------
# Domain types


@dataclass(frozen=True)
class ToricData:
    rays: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        object.__setattr__(self, "rays", tuple(tuple(int(x) for x in r) for r in self.rays))

    def violations(self) -> list[str]:
        out = []
        for i, r in enumerate(self.rays):
            if len(r) != 3:
                out.append(f"ray {i}: expected 3 coordinates, got {len(r)}")
            elif r[-1] != 1:
                out.append(f"ray {i}: last coordinate is {r[-1]}, expected 1")
        return out

    def annihilated_by(self, charges) -> bool:
        """True if every charge row q satisfies sum_i q_i * b_i = 0."""
        for q in charges:
            if len(q) != len(self.rays):
                return False
            for axis in range(3):
                if sum(as_rational(qi) * r[axis] for qi, r in zip(q, self.rays)) != 0:
                    return False
        return True


@dataclass(frozen=True)
class ChargeVectorSystem:
    """Extended charge vectors: ``n_toric`` toric columns followed by two brane columns."""

    rows: tuple[tuple[FramedRational, ...], ...]
    n_toric: int
    brane_row_index: int
    framing_symbol: str = "f"
    root_order: int = 1
    row_labels: tuple[str, ...] = ()

    def __post_init__(self):
        rows = tuple(tuple(FramedRational.coerce(x) for x in r) for r in self.rows)
        object.__setattr__(self, "rows", rows)
        if not self.row_labels:
            object.__setattr__(self, "row_labels", tuple(f"l{i}" for i in range(len(rows))))
        else:
            object.__setattr__(self, "row_labels", tuple(self.row_labels))

    @property
    def n_rows(self) -> int:
        return len(self.rows)

    @property
    def n_cols(self) -> int:
        return self.n_toric + 2

    def at_framing(self, value):
        return [[x.substitute(value) for x in row] for row in self.rows]

    def to_json(self):
        return [[x.to_json() for x in row] for row in self.rows]


@dataclass(frozen=True)
class FramingRelation:
    """``f = alpha * f_hat + beta``."""

    alpha: Fraction
    beta: Fraction

    def __post_init__(self):
        object.__setattr__(self, "alpha", as_rational(self.alpha))
        object.__setattr__(self, "beta", as_rational(self.beta))

    def __call__(self, framing_hat) -> Fraction:
        return self.alpha * as_rational(framing_hat) + self.beta

    def compose(self, inner: FramingRelation) -> FramingRelation:
        """self(inner(x)): relation of the outer source to the inner target."""
        return FramingRelation(self.alpha * inner.alpha, self.alpha * inner.beta + self.beta)

    def describe(self, src="f", tgt="fh") -> str:
        a, b = format_rational(self.alpha), format_rational(self.beta)
        return f"{src} = {a}*{tgt} + {b}" if self.beta >= 0 else f"{src} = {a}*{tgt} - {format_rational(-self.beta)}"

    def to_json(self):
        return {"alpha": format_rational(self.alpha), "beta": format_rational(self.beta)}


@dataclass(frozen=True)
class TransitionMatrix:
    """Rows follow the source system, columns the target system."""

    entries: tuple[tuple[Fraction, ...], ...]
    row_labels: tuple[str, ...] = ()
    col_labels: tuple[str, ...] = ()

    def __post_init__(self):
        object.__setattr__(
            self, "entries", tuple(tuple(as_rational(x) for x in row) for row in self.entries)
        )

    def __matmul__(self, other: TransitionMatrix) -> TransitionMatrix:
        return TransitionMatrix(matmul(self.entries, other.entries), self.row_labels, other.col_labels)

    def as_lists(self):
        return [list(r) for r in self.entries]

    def to_json(self):
        return [[format_rational(x) for x in row] for row in self.entries]


@dataclass(frozen=True)
class ChangeOfVariables:
    """Monomial substitution: source var a -> prod_b target_b ** exponents[a][b]."""

    source_vars: tuple[str, ...]
    target_vars: tuple[str, ...]
    exponents: tuple[tuple[Fraction, ...], ...]
    relation: FramingRelation = field(default_factory=lambda: FramingRelation(1, 0))
    s1: int | None = None

    def __post_init__(self):
        object.__setattr__(self, "source_vars", tuple(self.source_vars))
        object.__setattr__(self, "target_vars", tuple(self.target_vars))
        object.__setattr__(
            self, "exponents", tuple(tuple(as_rational(x) for x in row) for row in self.exponents)
        )

    def with_s1(self, s1: int) -> ChangeOfVariables:
        return ChangeOfVariables(self.source_vars, self.target_vars, self.exponents, self.relation, s1)

    def image(self, exps: dict) -> dict:
        """Exponent map of the image of the monomial prod_a source_a ** exps[a]."""
        out = {v: Fraction(0) for v in self.target_vars}
        for a, e in exps.items():
            row = self.exponents[self.source_vars.index(a)]
            for v, x in zip(self.target_vars, row):
                out[v] += e * x
        return {v: e for v, e in out.items() if e}

    def inverse(self) -> ChangeOfVariables:
        inv = inverse(self.exponents)
        a, b = self.relation.alpha, self.relation.beta
        return ChangeOfVariables(
            self.target_vars, self.source_vars, inv, FramingRelation(1 / a, -b / a), None
        )

    def rules(self) -> list[str]:
        out = []
        for a, row in zip(self.source_vars, self.exponents):
            factors = []
            for v, e in zip(self.target_vars, row):
                if e == 1:
                    factors.append(v)
                elif e:
                    factors.append(f"{v}^({format_rational(e)})")
            out.append(f"{a} = {'*'.join(factors) if factors else '1'}")
        return out

    def to_json(self):
        return {
            "source_vars": list(self.source_vars),
            "target_vars": list(self.target_vars),
            "exponents": [[format_rational(x) for x in row] for row in self.exponents],
            "rules": self.rules(),
        }


# ---------------------------------------------------------------------------
# Operations


def validate_system(sys: ChargeVectorSystem) -> list[str]:
    """Human-readable list of violated invariants; empty when valid."""
    problems = []
    nb = sys.brane_row_index
    if not 0 <= nb < sys.n_rows:
        problems.append(f"brane row index {nb} out of range")
    for i, row in enumerate(sys.rows):
        if len(row) != sys.n_cols:
            problems.append(f"row {i}: expected {sys.n_cols} entries, got {len(row)}")
            continue
        total = sum(row[: sys.n_toric], FramedRational())
        if not total.is_zero():
            problems.append(f"row {i}: Calabi-Yau violation, toric entries sum to {total}")
        w = Fraction(int(i == nb))
        b1, b2 = row[sys.n_toric], row[sys.n_toric + 1]
        if not (b1 == FramedRational(w) and b2 == FramedRational(-w)):
            problems.append(f"row {i}: brane columns are ({b1}, {b2}), expected ({w}, {-w})")
    if not problems and not _independent(sys):
        problems.append("rows are linearly dependent over Q(framing)")
    return problems


def _independent(sys: ChargeVectorSystem) -> bool:
    # every maximal minor is a polynomial of degree <= n_rows in the framing,
    # so full rank at one of n_rows + 1 sample points decides generic rank
    return any(rank(sys.at_framing(v)) == sys.n_rows for v in range(sys.n_rows + 1))


def _combine(weights, rows, n):
    out = [0] * n
    for w, row in zip(weights, rows):
        if w:
            for j, x in enumerate(row):
                if x:
                    out[j] += w * x
    return out


def solve_transition(src: ChargeVectorSystem, tgt: ChargeVectorSystem):
    """Exact (TransitionMatrix, FramingRelation) with src = T @ tgt after f = alpha*fh + beta."""
    if src.n_rows != tgt.n_rows or src.n_cols != tgt.n_cols:
        raise RankMismatch(
            f"shape mismatch: {src.n_rows}x{src.n_cols} vs {tgt.n_rows}x{tgt.n_cols}"
        )
    k, n = src.n_rows, src.n_cols
    s0 = [[x.c0 for x in row] for row in src.rows]
    s1 = [[x.c1 for x in row] for row in src.rows]
    g0 = [[x.c0 for x in row] for row in tgt.rows]
    g1 = [[x.c1 for x in row] for row in tgt.rows]
    free = [j for j in range(n) if not any(r[j] for r in s1) and not any(r[j] for r in g1)]
    framed = [j for j in range(n) if j not in free]

    # T @ G = F on the framing-free columns: one elimination on [G^T | F^T]
    aug = [[g0[b][j] for b in range(k)] + [s0[a][j] for a in range(k)] for j in free]
    red, piv = rref(aug)
    rk = len([c for c in piv if c < k])
    if rk < k:
        raise RankMismatch(
            f"framing-free columns {free} have rank {rk} < {k}; transition matrix not unique"
        )
    if len(piv) > k:
        a = piv[k] - k
        raise NoFramingRelation(
            f"source row {src.row_labels[a]} is not a combination of the target rows "
            "on the framing-free columns"
        )
    t = [[red[b][k + a] for b in range(k)] for a in range(k)]

    # target combination, split into constant and framing parts
    r0 = [_combine(t[a], g0, n) for a in range(k)]
    r1 = [_combine(t[a], g1, n) for a in range(k)]

    alphas, betas = set(), set()
    for a in range(k):
        for j in framed:
            if s1[a][j]:
                alphas.add(r1[a][j] / s1[a][j])
                betas.add((r0[a][j] - s0[a][j]) / s1[a][j])
            elif r1[a][j] or r0[a][j] != s0[a][j]:
                raise NoFramingRelation(
                    f"entry ({src.row_labels[a]}, column {j}) is {src.rows[a][j]} but the target "
                    f"combination gives {FramedRational(r0[a][j], r1[a][j])}; "
                    "no framing relation can match it"
                )
    if len(alphas) != 1 or len(betas) != 1:
        if not alphas:
            raise NoFramingRelation("source system has no framing dependence to relate")
        raise NoFramingRelation(
            f"framing columns demand inconsistent relations: alpha in {sorted(alphas)}, "
            f"beta in {sorted(betas)}"
        )
    rel = FramingRelation(alphas.pop(), betas.pop())

    # full symbolic identity: s0 + s1*(alpha*fh + beta) == r0 + r1*fh for every entry
    for a in range(k):
        for j in range(n):
            if s0[a][j] + s1[a][j] * rel.beta != r0[a][j] or s1[a][j] * rel.alpha != r1[a][j]:
                raise NoFramingRelation(f"symbolic check failed at ({a}, {j})")

    sb, tb = src.brane_row_index, tgt.brane_row_index
    for a in range(k):
        if t[a][tb] != int(a == sb):
            raise NoFramingRelation(f"brane column not preserved: T[{a}][{tb}] = {t[a][tb]}")

    return TransitionMatrix(t, src.row_labels, tgt.row_labels), rel


def change_of_variables(T: TransitionMatrix, rel: FramingRelation, src_vars, tgt_vars) -> ChangeOfVariables:
    if len(src_vars) != len(T.entries) or len(tgt_vars) != len(T.entries[0]):
        raise ValueError("variable lists do not match the transition matrix shape")
    return ChangeOfVariables(tuple(src_vars), tuple(tgt_vars), T.entries, rel)


def determine_s1(src_spec, tgt_spec, correspondence, framing=0, framing_hat=0) -> int:
    """Constant c with P_tgt(m_hat) = c * P_src(m) over every pair of the correspondence.

    ``correspondence`` is a sequence of (source index, target index) pairs.
    """
    ratios = set()
    witness = {}
    for ia, ib in correspondence:
        pa = src_spec.prefactor.evaluate(ia, framing)
        pb = tgt_spec.prefactor.evaluate(ib, framing_hat)
        c = pb / pa
        if c not in ratios:
            witness[c] = ia
        ratios.add(c)
        if len(ratios) > 1:
            break
    if not ratios:
        raise NonConstantRatio("empty correspondence; the ratio is undetermined")
    if len(ratios) > 1:
        a, b = list(witness.items())[:2]
        raise NonConstantRatio(
            f"prefactor ratio varies: {format_rational(a[0])} at {a[1]}, "
            f"{format_rational(b[0])} at {b[1]}"
        )
    c = ratios.pop()
    if c.denominator != 1 or c <= 0:
        raise NonInteger(f"prefactor ratio {format_rational(c)} is not a positive integer")
    return int(c)


def secondary_fan_rays(charge_rows: Sequence[Sequence]) -> list[tuple[int, int]]:
    """Primitive, deduplicated columns of a rank-2 charge matrix, in column order."""
    rows = [[as_rational(x) for x in r] for r in charge_rows]
    if len(rows) != 2:
        raise WrongRank(f"expected 2 charge rows, got {len(rows)}")
    if len(rows[0]) != len(rows[1]):
        raise WrongRank("charge rows have different lengths")
    if rank(rows) != 2:
        raise WrongRank("charge rows are linearly dependent")
    seen = []
    for x, y in zip(*rows):
        if x == 0 and y == 0:
            continue
        den = math.lcm(x.denominator, y.denominator)
        xi, yi = int(x * den), int(y * den)
        g = math.gcd(xi, yi)
        ray = (xi // g, yi // g)
        if ray not in seen:
            seen.append(ray)
    return seen
