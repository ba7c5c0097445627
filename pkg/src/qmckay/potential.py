"""Superpotential specifications, exact term evaluation and the correspondence check.

A superpotential is described declaratively by :class:`SuperpotentialSpec`:
its general term, at an admissible index vector ``m`` and framing ``f``, is

    (-1)^{sign(m, f)} * Gamma(A(m, f)) / Gamma(1 + B(m, f))
    -----------------------------------------------------------  * q^{map(m)}
                  P(m, f) * prod_j D_j(m)!

where every form is affine in ``m`` with coefficients affine in ``f``.
"""

from __future__ import annotations

import itertools
import json
import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from importlib import resources
from pathlib import Path
from typing import Mapping

from .errors import (
    AssertionFailure,
    NonGenericFraming,
    NotBijective,
    PipelineError,
    PoleError,
    QMcKayError,
    SemanticError,
    SpecSyntaxError,
    UnboundedRegion,
)
from .exactnum import (
    Cyclotomic,
    FramedRational,
    as_rational,
    format_rational,
    gamma_ratio,
    parse_rational,
    root_of_unity,
)
from .lattice import (
    ChargeVectorSystem,
    ChangeOfVariables,
    ToricData,
    change_of_variables,
    determine_s1,
    rref,
    solve_transition,
    validate_system,
)
from .series import DiffReport, Monomial, PuiseuxSeries, Region, compare, scale, substitute

BUNDLED = {
    "z5-orbifold": "z5_orbifold.json",
    "z5-resolution": "z5_resolution.json",
}


# ---------------------------------------------------------------------------
# Forms


@dataclass(frozen=True)
class FramedLinearForm:
    """constant + sum_v coeffs[v] * m_v, with framing-affine coefficients."""

    constant: FramedRational = FramedRational()
    coeffs: tuple[tuple[str, FramedRational], ...] = ()

    def __post_init__(self):
        items = self.coeffs.items() if isinstance(self.coeffs, Mapping) else self.coeffs
        cleaned = tuple(sorted((v, FramedRational.coerce(c)) for v, c in items))
        object.__setattr__(self, "coeffs", tuple((v, c) for v, c in cleaned if not c.is_zero()))
        object.__setattr__(self, "constant", FramedRational.coerce(self.constant))

    @property
    def coefficient_map(self) -> dict[str, FramedRational]:
        return dict(self.coeffs)

    @property
    def variables(self) -> set[str]:
        return {v for v, _ in self.coeffs}

    @property
    def is_framing_free(self) -> bool:
        return self.constant.is_framing_free and all(c.is_framing_free for _, c in self.coeffs)

    def evaluate(self, index: Mapping[str, int], framing=0) -> Fraction:
        f = as_rational(framing)
        total = self.constant.substitute(f)
        for v, c in self.coeffs:
            total += c.substitute(f) * index.get(v, 0)
        return total

    def to_json(self):
        out = {"coeffs": {v: _fr_to_json(c) for v, c in self.coeffs}}
        if not self.constant.is_zero():
            out["const"] = _fr_to_json(self.constant)
        return out

    def __str__(self):
        parts = [f"({c})*{v}" for v, c in self.coeffs]
        if not self.constant.is_zero() or not parts:
            parts.insert(0, str(self.constant))
        return " + ".join(parts)


@dataclass(frozen=True)
class SignExpression:
    """Exponent of (-1): linear(m, f) + sum_i floor(floors_i(m, f))."""

    linear: FramedLinearForm = FramedLinearForm()
    floors: tuple[FramedLinearForm, ...] = ()

    def value(self, index, framing=0) -> Fraction:
        v = self.linear.evaluate(index, framing)
        for form in self.floors:
            v += math.floor(form.evaluate(index, framing))
        return v


@dataclass(frozen=True)
class SuperpotentialSpec:
    variables: tuple[str, ...]
    index_vars: tuple[str, ...]
    brane_index: str
    constraints: tuple[FramedLinearForm, ...]
    prefactor: FramedLinearForm
    factorial_factors: tuple[FramedLinearForm, ...]
    ratio_num: FramedLinearForm
    ratio_den: FramedLinearForm
    sign: SignExpression
    monomial_map: tuple[tuple[str, tuple[tuple[str, Fraction], ...]], ...]
    root_order: int

    @property
    def cyclotomic_order(self) -> int:
        return 2 * self.root_order

    def monomial(self, index: Mapping[str, int]) -> Monomial:
        exps: dict[str, Fraction] = {}
        for v, targets in self.monomial_map:
            for q, e in targets:
                exps[q] = exps.get(q, Fraction(0)) + e * index.get(v, 0)
        return Monomial(exps)

    def monomial_matrix(self):
        """Rows: index vars; columns: q-variables."""
        mm = {v: dict(t) for v, t in self.monomial_map}
        return [[mm.get(v, {}).get(q, Fraction(0)) for q in self.variables] for v in self.index_vars]

    def to_json(self):
        return {
            "variables": list(self.variables),
            "index_vars": list(self.index_vars),
            "brane_index": self.brane_index,
            "constraints": [c.to_json() for c in self.constraints],
            "prefactor": self.prefactor.to_json(),
            "factorial_factors": [d.to_json() for d in self.factorial_factors],
            "ratio_num": self.ratio_num.to_json(),
            "ratio_den": self.ratio_den.to_json(),
            "sign": {
                "linear": self.sign.linear.to_json(),
                "floors": [f.to_json() for f in self.sign.floors],
            },
            "monomial_map": {
                v: {q: format_rational(e) for q, e in t} for v, t in self.monomial_map
            },
            "root_order": self.root_order,
        }


@dataclass(frozen=True)
class GeometryBundle:
    name: str
    toric: ToricData
    charges: ChargeVectorSystem
    spec: SuperpotentialSpec
    gauge_charges: tuple[tuple[int, ...], ...] = ()
    description: str = ""
    issues: tuple[str, ...] = ()


# ---------------------------------------------------------------------------
# Parsing


def _fr_to_json(x: FramedRational):
    if x.is_framing_free:
        return format_rational(x.c0)
    return x.to_json()


def _parse_rational(value, path) -> Fraction:
    if isinstance(value, bool) or not isinstance(value, (str, int)):
        raise SpecSyntaxError(f"expected a rational string, got {value!r}", path)
    if isinstance(value, int):
        return Fraction(value)
    try:
        return parse_rational(value)
    except ZeroDivisionError:
        raise SemanticError(f"zero denominator in {value!r}", path) from None
    except ValueError as exc:
        raise SpecSyntaxError(str(exc), path) from None


def _parse_framed(value, path) -> FramedRational:
    if isinstance(value, dict):
        extra = set(value) - {"c0", "c1"}
        if extra:
            raise SpecSyntaxError(f"unexpected keys {sorted(extra)}", path)
        return FramedRational(
            _parse_rational(value.get("c0", "0"), f"{path}.c0"),
            _parse_rational(value.get("c1", "0"), f"{path}.c1"),
        )
    return FramedRational(_parse_rational(value, path))


def _parse_form(value, path, index_vars) -> FramedLinearForm:
    if not isinstance(value, dict):
        raise SpecSyntaxError("expected an object with 'coeffs' (and optional 'const')", path)
    extra = set(value) - {"const", "coeffs"}
    if extra:
        raise SpecSyntaxError(f"unexpected keys {sorted(extra)}", path)
    coeffs = value.get("coeffs", {})
    if not isinstance(coeffs, dict):
        raise SpecSyntaxError("'coeffs' must be an object", f"{path}.coeffs")
    parsed = {}
    for v, c in coeffs.items():
        if v not in index_vars:
            raise SemanticError(f"unknown index variable {v!r}", f"{path}.coeffs.{v}")
        parsed[v] = _parse_framed(c, f"{path}.coeffs.{v}")
    return FramedLinearForm(_parse_framed(value.get("const", "0"), f"{path}.const"), parsed)


def _require(doc, key, path, kind=None):
    if not isinstance(doc, dict) or key not in doc:
        raise SpecSyntaxError(f"missing field {key!r}", path)
    value = doc[key]
    if kind is not None and not isinstance(value, kind):
        raise SpecSyntaxError(f"field {key!r} has wrong type {type(value).__name__}", f"{path}.{key}")
    return value


def _names(values, path):
    if not all(isinstance(v, str) and v for v in values):
        raise SpecSyntaxError("names must be non-empty strings", path)
    if len(set(values)) != len(values):
        raise SemanticError(f"duplicate names {values}", path)
    return tuple(values)


def parse_spec(doc, path="spec") -> SuperpotentialSpec:
    """Build a validated :class:`SuperpotentialSpec` from a JSON object or text."""
    if isinstance(doc, (str, bytes)):
        doc = _loads(doc)
    variables = _names(_require(doc, "variables", path, list), f"{path}.variables")
    index_vars = _names(_require(doc, "index_vars", path, list), f"{path}.index_vars")
    brane = _require(doc, "brane_index", path, str)
    if brane not in index_vars:
        raise SemanticError(f"brane index {brane!r} is not an index variable", f"{path}.brane_index")
    root_order = _require(doc, "root_order", path, int)
    if root_order < 1:
        raise SemanticError("root_order must be positive", f"{path}.root_order")

    constraints = tuple(
        _parse_form(c, f"{path}.constraints[{i}]", index_vars)
        for i, c in enumerate(_require(doc, "constraints", path, list))
    )
    for i, c in enumerate(constraints):
        if not c.is_framing_free:
            raise SemanticError("constraints must not depend on the framing", f"{path}.constraints[{i}]")
    factors = tuple(
        _parse_form(c, f"{path}.factorial_factors[{i}]", index_vars)
        for i, c in enumerate(_require(doc, "factorial_factors", path, list))
    )
    sign_doc = _require(doc, "sign", path, dict)
    sign = SignExpression(
        _parse_form(_require(sign_doc, "linear", f"{path}.sign"), f"{path}.sign.linear", index_vars),
        tuple(
            _parse_form(c, f"{path}.sign.floors[{i}]", index_vars)
            for i, c in enumerate(sign_doc.get("floors", []))
        ),
    )
    mm_doc = _require(doc, "monomial_map", path, dict)
    mmap = []
    for v, targets in mm_doc.items():
        p = f"{path}.monomial_map.{v}"
        if v not in index_vars:
            raise SemanticError(f"unknown index variable {v!r}", p)
        if not isinstance(targets, dict):
            raise SpecSyntaxError("expected an object of variable exponents", p)
        for q in targets:
            if q not in variables:
                raise SemanticError(f"unknown variable {q!r}", f"{p}.{q}")
        mmap.append((v, tuple(sorted((q, _parse_rational(e, f"{p}.{q}")) for q, e in targets.items()))))

    return SuperpotentialSpec(
        variables=variables,
        index_vars=index_vars,
        brane_index=brane,
        constraints=constraints,
        prefactor=_parse_form(_require(doc, "prefactor", path), f"{path}.prefactor", index_vars),
        factorial_factors=factors,
        ratio_num=_parse_form(_require(doc, "ratio_num", path), f"{path}.ratio_num", index_vars),
        ratio_den=_parse_form(_require(doc, "ratio_den", path), f"{path}.ratio_den", index_vars),
        sign=sign,
        monomial_map=tuple(sorted(mmap)),
        root_order=root_order,
    )


def _loads(text):
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise SpecSyntaxError(f"invalid JSON at line {exc.lineno}, column {exc.colno}: {exc.msg}") from None


def parse_bundle(doc) -> GeometryBundle:
    if isinstance(doc, (str, bytes)):
        doc = _loads(doc)
    if not isinstance(doc, dict):
        raise SpecSyntaxError("bundle must be a JSON object")
    name = _require(doc, "name", "", str)
    rays = _require(doc, "rays", "", list)
    toric = ToricData(rays)
    bad = toric.violations()
    if bad:
        raise SemanticError("; ".join(bad), "rays")

    framing_symbol = _require(doc, "framing_symbol", "", str)
    root_order = _require(doc, "root_order", "", int)
    raw_rows = _require(doc, "charge_rows", "", list)
    rows = []
    for i, row in enumerate(raw_rows):
        if not isinstance(row, list):
            raise SpecSyntaxError("charge row must be a list", f"charge_rows[{i}]")
        rows.append(tuple(_parse_framed(x, f"charge_rows[{i}][{j}]") for j, x in enumerate(row)))
    widths = {len(r) for r in rows}
    if len(widths) != 1:
        raise SemanticError("charge rows have different lengths", "charge_rows")
    n_toric = widths.pop() - 2
    if n_toric != len(toric.rays):
        raise SemanticError(
            f"{n_toric} toric columns but {len(toric.rays)} rays", "charge_rows"
        )
    brane_row = doc.get("brane_row", len(rows) - 1)
    labels = tuple(doc.get("row_labels", ()))
    if labels and len(labels) != len(rows):
        raise SemanticError("row_labels length does not match charge_rows", "row_labels")
    if not isinstance(brane_row, int) or not 0 <= brane_row < len(rows):
        raise SemanticError(f"brane_row {brane_row!r} out of range", "brane_row")
    charges = ChargeVectorSystem(tuple(rows), n_toric, brane_row, framing_symbol, root_order, labels)
    # invariant violations are diagnostics here; solve_transition decides what they break
    issues = tuple(validate_system(charges))

    gauge = tuple(tuple(int(x) for x in r) for r in doc.get("gauge_charges", ()))
    if gauge and not toric.annihilated_by(gauge):
        raise SemanticError("gauge charges do not annihilate the rays", "gauge_charges")

    spec = parse_spec(_require(doc, "spec", "", dict))
    if len(spec.variables) != charges.n_rows:
        raise SemanticError(
            "spec variables must match charge rows one-to-one (same order)", "spec.variables"
        )
    if spec.root_order != root_order:
        raise SemanticError("spec root_order differs from bundle root_order", "spec.root_order")
    return GeometryBundle(name, toric, charges, spec, gauge, doc.get("description", ""), issues)


def load_bundle(source) -> GeometryBundle:
    """Load a bundle from a path, or from a bundled name such as ``z5-orbifold``."""
    path = Path(source)
    if not path.exists() and str(source) in BUNDLED:
        text = resources.files("qmckay.data").joinpath(BUNDLED[str(source)]).read_text()
    else:
        text = path.read_text()
    return parse_bundle(text)


def bundle_document(name: str) -> dict:
    return json.loads(resources.files("qmckay.data").joinpath(BUNDLED[name]).read_text())


# ---------------------------------------------------------------------------
# Enumeration and evaluation


def _index_bounds(spec: SuperpotentialSpec, m0_max: int) -> dict[str, int]:
    """Upper bound for each non-brane index from a single constraint form.

    A constraint c0 + c_b*m_b + sum c_v*m_v >= 0 with c_v < 0 and every other
    non-brane coefficient <= 0 gives m_v <= (c0 + max_b c_b*m_b) / |c_v|.
    """
    brane = spec.brane_index
    bounds = {}
    for v in spec.index_vars:
        if v == brane:
            continue
        best = None
        for form in spec.constraints:
            cm = {k: c.c0 for k, c in form.coeffs}
            cv = cm.get(v, Fraction(0))
            if cv >= 0 or any(c > 0 for k, c in cm.items() if k not in (v, brane)):
                continue
            cb = cm.get(brane, Fraction(0))
            top = form.constant.c0 + max(cb * 1, cb * m0_max)
            bound = math.floor(top / -cv)
            best = bound if best is None else min(best, bound)
        if best is None:
            raise UnboundedRegion(f"no constraint bounds index {v!r}")
        bounds[v] = max(best, -1)
    return bounds


def _is_nonneg_int(x: Fraction) -> bool:
    return x.denominator == 1 and x >= 0


def admissible_indices(spec: SuperpotentialSpec, framing=0, m0_max: int = 0) -> list[dict]:
    """All index vectors with 1 <= m0 <= m0_max satisfying every constraint.

    Ordered by the brane index, then the remaining indices in declaration order.
    """
    if m0_max < 1:
        return []
    bounds = _index_bounds(spec, m0_max)
    others = [v for v in spec.index_vars if v != spec.brane_index]
    out = []
    for m0 in range(1, m0_max + 1):
        for rest in itertools.product(*(range(bounds[v] + 1) for v in others)):
            idx = {spec.brane_index: m0, **dict(zip(others, rest))}
            if all(_is_nonneg_int(c.evaluate(idx, framing)) for c in spec.constraints):
                out.append({v: idx[v] for v in spec.index_vars})
    return out


def term(spec: SuperpotentialSpec, index: Mapping[str, int], framing=0, order: int | None = None):
    """(monomial, exact coefficient) of the general term at an admissible index."""
    f = as_rational(framing)
    order = order or spec.cyclotomic_order
    key = tuple(index[v] for v in spec.index_vars)

    for i, c in enumerate(spec.constraints):
        if not _is_nonneg_int(c.evaluate(index, f)):
            raise AssertionFailure(f"constraint {i} is not a nonnegative integer at {key}")
    denom = spec.prefactor.evaluate(index, f)
    if denom == 0:
        raise AssertionFailure(f"prefactor vanishes at {key}")
    for j, d in enumerate(spec.factorial_factors):
        dv = d.evaluate(index, f)
        if not _is_nonneg_int(dv):
            raise AssertionFailure(f"factorial argument {j} = {dv} is not a nonnegative integer at {key}")
        denom *= math.factorial(dv.numerator)
    a = spec.ratio_num.evaluate(index, f)
    b = 1 + spec.ratio_den.evaluate(index, f)
    if (a - b).denominator != 1:
        raise AssertionFailure(f"Gamma arguments {a}, {b} do not differ by an integer at {key}")

    s = spec.sign.value(index, f)
    if (order // 2) % s.denominator:
        raise AssertionFailure(f"sign exponent {s} at {key} is not in Q(zeta_{order})")
    try:
        ratio = gamma_ratio(a, b)
    except PoleError as exc:
        raise NonGenericFraming(f"framing {f} hits a Gamma pole at index {key}: {exc}", key) from exc
    coeff = root_of_unity(s.numerator, s.denominator, order) * (ratio / denom)
    return spec.monomial(index), coeff


def _eval_chunk(args):
    spec, chunk, framing, order = args
    return [term(spec, idx, framing, order) for idx in chunk]


def default_jobs() -> int:
    try:
        return max(1, int(os.environ.get("QMCKAY_JOBS", "1")))
    except ValueError:
        return 1


def build(spec: SuperpotentialSpec, framing=0, m0_max: int = 0, jobs: int = 1,
          order: int | None = None, indices=None) -> PuiseuxSeries:
    """Truncated series summed over all admissible indices with m0 <= m0_max."""
    order = order or spec.cyclotomic_order
    if indices is None:
        indices = admissible_indices(spec, framing, m0_max)
    if jobs > 1 and len(indices) > 1:
        size = -(-len(indices) // (4 * jobs))
        chunks = [indices[i:i + size] for i in range(0, len(indices), size)]
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            terms = [t for part in pool.map(_eval_chunk, [(spec, c, framing, order) for c in chunks]) for t in part]
    else:
        terms = [term(spec, idx, framing, order) for idx in indices]
    return PuiseuxSeries(terms, order, Region(m0_max, frozenset(spec.variables)))


def index_correspondence(cov: ChangeOfVariables, spec_a: SuperpotentialSpec, spec_b: SuperpotentialSpec,
                         framing=0, framing_hat=0, m0_max: int = 0) -> list[tuple[dict, dict]]:
    """Pair each admissible A-index with the B-index whose monomial is its substituted image."""
    ia_all = admissible_indices(spec_a, framing, m0_max)
    ib_all = admissible_indices(spec_b, framing_hat, m0_max)
    b_keys = {tuple(ib[v] for v in spec_b.index_vars) for ib in ib_all}

    # exponent vector e over B's variables -> index vector x with M^T x = e
    mt = [list(col) for col in zip(*spec_b.monomial_matrix())]
    k = len(spec_b.index_vars)
    red, piv = rref([row + [0] for row in mt])
    if piv != list(range(k)):
        raise NotBijective("target monomial map is not injective; indices cannot be recovered")

    pairs, hit = [], set()
    for ia in ia_all:
        image = cov.image(spec_a.monomial(ia).exponents)
        e = [image.get(q, Fraction(0)) for q in spec_b.variables]
        sol = rref([row + [x] for row, x in zip(mt, e)])
        if k in sol[1]:
            raise NotBijective(f"image of {ia} is not a monomial of the target series", ia)
        x = [sol[0][i][k] for i in range(k)]
        if any(v.denominator != 1 for v in x):
            raise NotBijective(f"image of {ia} has non-integral target index {x}", ia)
        key = tuple(int(v) for v in x)
        if key not in b_keys:
            raise NotBijective(f"image of {ia} is {key}, which is not admissible for the target", ia)
        if key in hit:
            raise NotBijective(f"two source indices map to {key}", ia)
        ib = dict(zip(spec_b.index_vars, key))
        if ib[spec_b.brane_index] != ia[spec_a.brane_index]:
            raise NotBijective(f"brane index not preserved at {ia}", ia)
        hit.add(key)
        pairs.append((ia, ib))
    if len(hit) != len(b_keys):
        missing = sorted(b_keys - hit)[0]
        raise NotBijective(f"target index {missing} has no preimage", dict(zip(spec_b.index_vars, missing)))
    return pairs


# ---------------------------------------------------------------------------
# Verification pipeline


@dataclass
class VerificationReport:
    source: str
    target: str
    framing_hat: Fraction
    m0_max: int
    status: str = "error"
    stage: str | None = None
    error: str | None = None
    error_type: str | None = None
    framing: Fraction | None = None
    transition: object = None
    relation: object = None
    cov: ChangeOfVariables | None = None
    s1: int | None = None
    counts: dict = field(default_factory=dict)
    diff: DiffReport | None = None
    warnings: list = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return self.status == "pass"

    def to_json(self, diff_limit: int | None = None) -> dict:
        out = {
            "inputs": {
                "source": self.source,
                "target": self.target,
                "framing_hat": format_rational(self.framing_hat),
                "m0_max": self.m0_max,
            },
            "status": self.status,
            "stage": self.stage,
            "error": None if self.error is None else {"type": self.error_type, "message": self.error},
            "derived": {
                "framing": None if self.framing is None else format_rational(self.framing),
                "transition_matrix": None if self.transition is None else {
                    "rows": list(self.transition.row_labels),
                    "columns": list(self.transition.col_labels),
                    "entries": self.transition.to_json(),
                },
                "framing_relation": None if self.relation is None else {
                    **self.relation.to_json(), "text": self.relation.describe(),
                },
                "change_of_variables": None if self.cov is None else self.cov.to_json(),
                "s1": self.s1,
            },
            "counts": dict(self.counts),
            "warnings": list(self.warnings),
            "diff": None if self.diff is None else self.diff.to_json(diff_limit),
        }
        return out


def verify_correspondence(bundle_a: GeometryBundle, bundle_b: GeometryBundle, framing_hat=0,
                          m0_max: int = 15, jobs: int = 1, s1_override: int | None = None,
                          raise_errors: bool = True) -> VerificationReport:
    """Derive the change of variables from the charge vectors and check W_A = s1 * W_B.

    ``s1_override`` replaces the derived scalar (used for negative controls).
    With ``raise_errors`` false, stage failures are recorded in the report
    instead of raising :class:`PipelineError`.
    """
    fh = as_rational(framing_hat)
    rep = VerificationReport(bundle_a.name, bundle_b.name, fh, m0_max)
    rep.warnings = [f"{bundle_a.name}: {w}" for w in bundle_a.issues]
    rep.warnings += [f"{bundle_b.name}: {w}" for w in bundle_b.issues]
    sa, sb = bundle_a.spec, bundle_b.spec
    stage = "solve_transition"
    try:
        rep.transition, rep.relation = solve_transition(bundle_a.charges, bundle_b.charges)
        rep.framing = f = rep.relation(fh)

        stage = "change_of_variables"
        cov = change_of_variables(rep.transition, rep.relation, sa.variables, sb.variables)
        rep.cov = cov

        stage = "index_correspondence"
        pairs = index_correspondence(cov, sa, sb, f, fh, m0_max)
        rep.counts["admissible_source"] = len(pairs)
        rep.counts["admissible_target"] = len(pairs)

        stage = "determine_s1"
        rep.s1 = determine_s1(sa, sb, pairs, f, fh)
        rep.cov = cov = cov.with_s1(rep.s1)

        stage = "build"
        order = 2 * math.lcm(sa.root_order, sb.root_order)
        w_a = build(sa, f, m0_max, jobs, order, indices=[p[0] for p in pairs])
        w_b = build(sb, fh, m0_max, jobs, order, indices=[p[1] for p in pairs])
        rep.counts["source_terms"] = len(w_a)
        rep.counts["target_terms"] = len(w_b)

        stage = "substitute"
        lhs = substitute(w_a, cov)
        rep.counts["collisions"] = lhs.collisions
        rhs = scale(w_b, rep.s1 if s1_override is None else s1_override)

        stage = "compare"
        rep.diff = compare(lhs, rhs)
        rep.counts["matched_terms"] = rep.diff.matched
        rep.counts["mismatched_terms"] = rep.diff.total
        rep.status = "pass" if rep.diff.empty else "fail"
        rep.stage = None if rep.diff.empty else "compare"
    except QMcKayError as exc:
        rep.status, rep.stage = "error", stage
        rep.error, rep.error_type = str(exc), type(exc).__name__
        if raise_errors:
            err = PipelineError(stage, exc)
            err.report = rep
            raise err from exc
    return rep
