"""Command-line front end: ``qmckay verify | eval | fan | selftest``.

Exit codes
    0  success / identity verified
    1  usage, parse or IO error
    2  coefficient mismatch (verify) or failed property (selftest)
    3  structural error in the verification pipeline
    4  non-generic framing while evaluating a series
    5  charge matrix of the wrong rank for a secondary fan
"""

from __future__ import annotations

import argparse
import json
import logging
import random
import sys
from fractions import Fraction

from .errors import NonGenericFraming, QMcKayError, SpecSyntaxError, WrongRank
from .exactnum import Cyclotomic, cyclotomic_polynomial, format_rational, gamma_float, gamma_ratio, parse_rational, root_of_unity
from .lattice import secondary_fan_rays
from .potential import VerificationReport, build, default_jobs, load_bundle, verify_correspondence


EXIT_OK, EXIT_USAGE, EXIT_MISMATCH, EXIT_STRUCTURAL, EXIT_NONGENERIC, EXIT_RANK = 0, 1, 2, 3, 4, 5
DIFF_CAP = 20

__all__ = ["main", "VerificationReport", "run_selftest", "exit_code"]


def _rational(text):
    try:
        return parse_rational(text)
    except (ValueError, ZeroDivisionError) as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def dumps(doc) -> str:
    return json.dumps(doc, indent=2, sort_keys=True) + "\n"


def exit_code(report: VerificationReport) -> int:
    return {"pass": EXIT_OK, "fail": EXIT_MISMATCH}.get(report.status, EXIT_STRUCTURAL)


def _write(path, text):
    if path in (None, "-"):
        sys.stdout.write(text)
    else:
        with open(path, "w") as fh:
            fh.write(text)


def _summary(rep: VerificationReport) -> str:
    lines = [
        f"source: {rep.source}   target: {rep.target}",
        f"framing_hat = {format_rational(rep.framing_hat)}   m0_max = {rep.m0_max}",
    ]
    if rep.relation is not None:
        lines.append(f"framing relation: {rep.relation.describe()}   (f = {format_rational(rep.framing)})")
    if rep.transition is not None:
        lines.append(f"transition matrix (rows {', '.join(rep.transition.row_labels)}; "
                     f"columns {', '.join(rep.transition.col_labels)}):")
        for label, row in zip(rep.transition.row_labels, rep.transition.entries):
            lines.append(f"  {label}: [" + ", ".join(format_rational(x) for x in row) + "]")
    if rep.cov is not None:
        lines.append("change of variables:")
        lines.extend(f"  {r}" for r in rep.cov.rules())
    if rep.s1 is not None:
        lines.append(f"s1 = {rep.s1}")
    if rep.counts:
        lines.append("counts: " + ", ".join(f"{k}={v}" for k, v in sorted(rep.counts.items())))
    for w in rep.warnings:
        lines.append(f"warning: {w}")
    if rep.diff is not None and not rep.diff.empty:
        d = rep.diff
        lines.append(f"differences: {d.total} (showing at most {DIFF_CAP})")
        for mono, left, right in d.mismatches[:DIFF_CAP]:
            lines.append(f"  {mono}: {left!r} != {right!r}")
        lines.extend(f"  {m}: only on the left" for m in d.left_only[:DIFF_CAP])
        lines.extend(f"  {m}: only on the right" for m in d.right_only[:DIFF_CAP])
    status = rep.status.upper() + (f" at stage {rep.stage}" if rep.stage else "")
    if rep.error:
        status += f": {rep.error_type}: {rep.error}"
    lines.append(f"status: {status}")
    return "\n".join(lines) + "\n"


def cmd_verify(args) -> int:
    try:
        a, b = load_bundle(args.orbifold), load_bundle(args.resolution)
    except (OSError, SpecSyntaxError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    rep = verify_correspondence(a, b, args.framing_hat, args.m0_max, args.jobs, raise_errors=False)
    if args.report:
        try:
            _write(args.report, dumps(rep.to_json()))
        except OSError as exc:
            print(f"error: {exc}", file=sys.stderr)
            return EXIT_USAGE
    sys.stdout.write(_summary(rep))
    if rep.status == "error":
        print(f"error at stage {rep.stage}: {rep.error_type}: {rep.error}", file=sys.stderr)
    return exit_code(rep)


def cmd_eval(args) -> int:
    try:
        bundle = load_bundle(args.bundle)
    except (OSError, SpecSyntaxError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    try:
        series = build(bundle.spec, args.framing, args.m0_max, args.jobs)
    except NonGenericFraming as exc:
        print(f"non-generic framing: index {exc.index}: {exc}", file=sys.stderr)
        return EXIT_NONGENERIC
    except QMcKayError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_USAGE
    doc = {
        "bundle": bundle.name,
        "framing": format_rational(args.framing),
        "region": series.region.to_json(),
        "terms": series.to_json(),
    }
    try:
        _write(args.out, dumps(doc))
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    print(f"{len(series)} terms", file=sys.stderr)
    return EXIT_OK


def fan_rows(bundle):
    """Charge rows used for the secondary fan: gauge charges when the bundle has them."""
    if bundle.gauge_charges:
        return [list(r) for r in bundle.gauge_charges]
    ch = bundle.charges
    return [
        [x.c0 for x in row[: ch.n_toric]]
        for i, row in enumerate(ch.rows)
        if i != ch.brane_row_index
    ]


def cmd_fan(args) -> int:
    try:
        bundle = load_bundle(args.bundle)
    except (OSError, SpecSyntaxError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    try:
        rays = secondary_fan_rays(fan_rows(bundle))
    except WrongRank as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_RANK
    for x, y in rays:
        print(f"({x},{y})")
    return EXIT_OK


def run_selftest(seed: int = 0, cases: int = 1000, tol: float = 1e-9) -> dict:
    """Exact gamma_ratio against the float oracle, plus cyclotomic identities."""
    rng = random.Random(seed)
    samples, max_err, worst = [], 0.0, None
    while len(samples) < cases:
        b = Fraction(rng.randint(-50, 50), rng.randint(1, 12))
        n = rng.randint(-20, 20)
        a = b + n
        if any(x <= 0 and x.denominator == 1 for x in (a, b)) or abs(a) > 50:
            continue
        samples.append((b, n))
        exact = gamma_ratio(a, b)
        approx = gamma_float(a) / gamma_float(b)
        err = abs(float(exact) - approx) / abs(float(exact))
        if not err <= max_err:
            max_err, worst = err, (format_rational(b), n)
    failures = []
    if not max_err <= tol:
        failures.append(f"gamma oracle: max relative error {max_err:.3e} at b={worst[0]}, n={worst[1]}")

    z = Cyclotomic.zeta_power(1, 10)
    one, zero = Cyclotomic.one(10), Cyclotomic.zero(10)
    checks = {
        "zeta10^10 = 1": z**10 == one,
        "sum of 10th roots = 0": sum((z**k for k in range(10)), zero) == zero,
        "Phi10(zeta10) = 0": sum((z**k * c for k, c in enumerate(cyclotomic_polynomial(10))), zero) == zero,
        "zeta10^3 * zeta10^7 = 1": z**3 * z**7 == one,
    }
    roots = [(p, q, root_of_unity(p, q, 10)) for p in range(-10, 11) for q in (1, 5)]
    checks["root_of_unity^(2q) = 1"] = all(w ** (2 * q) == one for _, q, w in roots)
    checks["root_of_unity periodic"] = all(root_of_unity(p + 2 * q, q, 10) == w for p, q, w in roots)
    failures.extend(name for name, ok in checks.items() if not ok)
    return {
        "seed": seed,
        "cases": len(samples),
        "max_relative_error": max_err,
        "samples": samples,
        "checks": checks,
        "failures": failures,
        "passed": not failures,
    }


def cmd_selftest(args) -> int:
    res = run_selftest(args.seed, args.cases)
    print(f"gamma_ratio vs Lanczos oracle: {res['cases']} cases, "
          f"max relative error {res['max_relative_error']:.3e}")
    for name, ok in res["checks"].items():
        print(f"{'ok  ' if ok else 'FAIL'} {name}")
    for f in res["failures"]:
        print(f"failure: {f}", file=sys.stderr)
    return EXIT_OK if res["passed"] else EXIT_MISMATCH


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="qmckay", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    v = sub.add_parser("verify", help="verify W_orbifold = s1 * W_resolution after the change of variables")
    v.add_argument("--orbifold", required=True, help="bundle file or bundled name (z5-orbifold)")
    v.add_argument("--resolution", required=True, help="bundle file or bundled name (z5-resolution)")
    v.add_argument("--framing-hat", type=_rational, required=True)
    v.add_argument("--m0-max", type=int, required=True)
    v.add_argument("--report", help="write the full JSON report here")
    v.add_argument("--jobs", type=int, default=None)
    v.set_defaults(func=cmd_verify)

    e = sub.add_parser("eval", help="write a truncated superpotential series as JSON")
    e.add_argument("--bundle", required=True)
    e.add_argument("--framing", type=_rational, required=True)
    e.add_argument("--m0-max", type=int, required=True)
    e.add_argument("--out", default="-")
    e.add_argument("--jobs", type=int, default=None)
    e.set_defaults(func=cmd_eval)

    f = sub.add_parser("fan", help="print the rays of the secondary fan")
    f.add_argument("--bundle", required=True)
    f.set_defaults(func=cmd_fan)

    s = sub.add_parser("selftest", help="gamma oracle and cyclotomic identity checks")
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--cases", type=int, default=1000)
    s.set_defaults(func=cmd_selftest)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_OK
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING)
    if getattr(args, "jobs", 1) is None:
        args.jobs = default_jobs()
    if getattr(args, "m0_max", 0) < 0:
        print("error: --m0-max must be nonnegative", file=sys.stderr)
        return EXIT_USAGE
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
