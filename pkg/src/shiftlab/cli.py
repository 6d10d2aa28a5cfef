"""Command-line interface.

Exit codes: 0 success, 2 invalid parameters, 3 inconclusive at the requested
precision, 4 internal disagreement between independent routes.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from fractions import Fraction

from .bilateral import PRESETS, PrecisionError, RigidityViolation, char_system, classify_shift
from .composition import build_measure, composition_matrix, equivalence_check
from .counterexample import (CertificateError, CrossCheckError, NonPrimeError, RationalRootError,
                             branch_tail_bound, branch_tails_exact, choose_parameters, gamma_limit_exponents,
                             gamma_solve, sweep, weights)
from .enclosure import DEFAULT_PRECISION, Enclosure
from .oracle import OffDiagonalError, product_compare, shift_matrix
from .radical import MonomialScalar
from .scalars import Verdict, to_json
from .shift import operator_norm_bound
from .tree import make_truncation

EXIT_OK = 0
EXIT_INVALID = 2
EXIT_INCONCLUSIVE = 3
EXIT_INTERNAL = 4


class Inconclusive(Exception):
    def __init__(self, message: str, report: dict):
        super().__init__(message)
        self.report = report


class Disagreement(Exception):
    def __init__(self, message: str, report: dict | None = None):
        super().__init__(message)
        self.report = report


def _precision_default() -> int:
    env = os.environ.get("SHIFTLAB_PRECISION")
    if env is None:
        return DEFAULT_PRECISION
    try:
        return int(env)
    except ValueError:
        raise SystemExit(f"SHIFTLAB_PRECISION must be an integer, got {env!r}")


def _dims(text: str) -> tuple[int, int, int]:
    parts = text.split(",")
    if len(parts) != 3:
        raise argparse.ArgumentTypeError("dims must be M,I,J")
    try:
        return tuple(int(x) for x in parts)  # type: ignore[return-value]
    except ValueError:
        raise argparse.ArgumentTypeError("dims must be integers")


def _decimal(x: Fraction, digits: int = 30) -> str:
    """Fixed-point decimal string of a rational, truncated toward zero."""
    sign = "-" if x < 0 else ""
    x = abs(x)
    whole = x.numerator // x.denominator
    frac = (x - whole) * 10 ** digits
    return f"{sign}{whole}.{frac.numerator // frac.denominator:0{digits}d}"


def _scalar_json(x) -> str | list[str]:
    if isinstance(x, Enclosure) and x.lo == x.hi:
        return str(x.lo)
    return to_json(x)


# -- commands -----------------------------------------------------------------------------


def cmd_construct(args) -> dict:
    params = choose_parameters(args.n, args.p)
    gamma = gamma_solve(params, max(args.count, params.n - 1))
    w = weights(params, gamma, args.precision)
    tree = make_truncation(1, 1, 1)
    norm = operator_norm_bound(tree, w, branch_tails_exact(params, 1, args.precision), args.precision)
    limit = MonomialScalar(params.basis, gamma_limit_exponents(params))
    return {
        "identity": "(S*S)^k = S*^k S^k holds exactly for k = n",
        "n": params.n,
        "p": params.p,
        "q": str(params.q),
        "c0": str(params.c0),
        "c": str(params.c),
        "basis": ["c"] + [f"S_{i}(q)" for i in range(1, params.n)],
        "basis_values": [str(b) for b in params.basis],
        "gamma": [
            {"index": j, "exponents": [str(e) for e in gamma.exponents(j)],
             "gamma_sq": str(gamma.squared(j)), "enclosure": to_json(gamma.enclosure(j, args.precision))}
            for j in range(args.count)
        ],
        "gamma_limit_sq": str((limit ** 2).to_radical()),
        "norm_sq": _scalar_json(norm.norm_sq),
        "norm": to_json(norm.norm),
        "norm_certified": norm.certified,
        "precision_bits": args.precision,
    }


def cmd_verify(args) -> dict:
    params = choose_parameters(args.n, args.p)
    report = sweep(params, args.kmax, args.precision, args.terms)
    out = {
        "identity": "(S*S)^k = S*^k S^k at the branching vertex, k = 2..kmax",
        "n": params.n,
        "p": params.p,
        "kmax": report.kmax,
        "precision_bits": report.precision,
        "series_terms": report.terms,
        "tail_bound": str(params.q ** report.terms / (1 - params.q)),
        "equal_at": report.equal_at,
        "inconclusive": report.inconclusive,
        "rows": [r.to_dict() for r in report.rows],
    }
    if report.inconclusive:
        raise Inconclusive(f"inconclusive at k={report.inconclusive}; retry with a higher --precision "
                           f"(e.g. {2 * args.precision}) or more --terms", out)
    if report.equal_at != [params.n]:
        raise Disagreement(f"equality found at k={report.equal_at}, expected only k={params.n}", out)
    return out


def cmd_bilateral(args) -> dict:
    win = PRESETS[args.preset](args.window)
    try:
        cls = classify_shift(win, args.k, exact_inputs=True)
    except RigidityViolation as exc:
        raise Disagreement(str(exc))
    out = {"preset": args.preset, "window": [win.offset, win.offset + len(win) - 1]}
    out.update(cls.to_dict())
    return out


def _root_report(k: int, prec: int) -> dict:
    cs = char_system(k, prec)
    out = {
        "k": k,
        "factor_identity": cs.factor_identity,
        "gcd_with_derivative": str(cs.gcd),
        "simple_except_one": cs.gcd_only_at_one,
        "inside_unit_disk": cs.inside_unit_disk,
        "certified": cs.certified,
        "roots": [{"center": [str(d.center[0]), str(d.center[1])], "radius": str(d.radius)}
                  for d in cs.roots],
        "precision_bits": prec,
    }
    if cs.max_modulus is not None:
        out["max_modulus"] = _scalar_json(cs.max_modulus)
        out["max_modulus_decimal"] = _decimal(cs.max_modulus.hi)
    else:
        out["max_modulus"] = None
    if not cs.certified:
        raise Disagreement(f"root certificate failed for k={k}", out)
    return out


def cmd_roots(args) -> dict:
    ks = [args.k] if args.kmax is None else list(range(1, args.kmax + 1))
    rows = [_root_report(k, args.precision) for k in ks]
    return rows[0] if len(rows) == 1 else {"rows": rows}


def cmd_oracle(args) -> dict:
    params = choose_parameters(args.n, args.p)
    M, I, J = args.dims
    t = make_truncation(M, I, J)
    gamma = gamma_solve(params, max(M + 1, params.n - 1))
    w = weights(params, gamma, args.precision)
    bounds = {}

    def tail_bound(j: int) -> Fraction:
        if j not in bounds:
            bounds[j] = branch_tail_bound(params, I, j, args.precision)
        return bounds[j].bound

    rep = product_compare(t, w, args.m, tail_bound, branch_tails_exact(params, I, args.precision),
                          args.precision)
    rep.tail_formula = "; ".join(f"j={j}: {b.formula}" for j, b in sorted(bounds.items()))
    out = {"identity": f"diagonals of (M^T M)^{args.m} and (M^T)^{args.m} M^{args.m}", "n": params.n, "p": params.p}
    out.update(rep.to_dict())
    out["tail_bounds"] = {str(j): str(b.bound) for j, b in sorted(bounds.items())}
    if args.coo:
        with open(args.coo, "w") as fh:
            fh.write(shift_matrix(t, w).to_coo_csv())
        out["coo"] = args.coo
    if rep.disagreements:
        raise Disagreement(f"oracle and path sums disagree at {[v.name for v in rep.disagreements]}", out)
    if rep.verdict is Verdict.INCONCLUSIVE:
        raise Inconclusive("oracle inconclusive; retry with more branches (I) or a higher --precision", out)
    expected_equal = args.m == params.n or args.m == 1
    if rep.verdict.equal != expected_equal:
        raise Disagreement(f"oracle verdict {rep.verdict.value} contradicts the symbolic verdict at m={args.m}", out)
    return out


def cmd_compose(args) -> dict:
    params = choose_parameters(args.n, args.p)
    M, I, J = args.dims
    t = make_truncation(M, I, J)
    w = weights(params, gamma_solve(params, max(M + 1, params.n - 1)), args.precision)
    ms = build_measure(t, w)
    eq = equivalence_check(t, w, ms)
    out = {"identity": "composition operator matrix equals weighted shift matrix (squared entries)",
           "n": params.n, "p": params.p, "dims": [M, I, J], "anchor": ms.anchor.name}
    out.update(eq.to_dict())
    if args.coo:
        with open(args.coo, "w") as fh:
            fh.write(composition_matrix(ms, t).to_coo_csv())
        out["coo"] = args.coo
    if not eq.equal:
        raise Disagreement("composition matrix differs from the shift matrix", out)
    return out


# -- output -------------------------------------------------------------------------------


def _table(report: dict) -> str:
    lines = []
    rows = report.get("rows")
    for key, val in report.items():
        if key == "rows":
            continue
        if isinstance(val, (dict, list)):
            val = json.dumps(val)
        lines.append(f"{key:>22}  {val}")
    if isinstance(rows, list) and rows:
        cols = [c for c in rows[0] if not isinstance(rows[0][c], (dict, list))]
        lines.append("")
        lines.append("  ".join(f"{c:>14}" for c in cols))
        for r in rows:
            lines.append("  ".join(f"{str(r.get(c, '')):>14}" for c in cols))
    return "\n".join(lines) + "\n"


def _emit(report: dict, args) -> None:
    text = json.dumps(report, indent=2) + "\n" if args.format == "json" else _table(report)
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--out", default=argparse.SUPPRESS, help="write the report here instead of stdout")
    common.add_argument("--format", choices=["json", "table"], default=argparse.SUPPRESS)
    common.add_argument("--precision", type=int, default=argparse.SUPPRESS,
                        help="working precision in bits (env SHIFTLAB_PRECISION, default 128)")
    common.add_argument("--terms", type=int, default=argparse.SUPPRESS,
                        help="override the number of series terms for S_{-m}")

    ap = argparse.ArgumentParser(prog="shiftlab", parents=[common],
                                 description="Weighted shifts on a rootless directed tree and the moment identity.")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("construct", parents=[common], help="parameters, spine weights and norm")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--p", type=int, required=True)
    p.add_argument("--count", type=int, default=16, help="number of spine weights to report")
    p.set_defaults(func=cmd_construct)

    p = sub.add_parser("verify", parents=[common], help="sweep k = 2..kmax")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--p", type=int, required=True)
    p.add_argument("--kmax", type=int, default=None)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("bilateral", parents=[common], help="classify a preset window of bilateral weights")
    p.add_argument("--preset", choices=sorted(PRESETS), required=True)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--window", type=int, default=8, help="half-width N of the window [-N, N]")
    p.set_defaults(func=cmd_bilateral)

    p = sub.add_parser("roots", parents=[common], help="certify the characteristic roots")
    g = p.add_mutually_exclusive_group(required=True)
    g.add_argument("--k", type=int)
    g.add_argument("--kmax", type=int)
    p.set_defaults(func=cmd_roots)

    p = sub.add_parser("oracle", parents=[common], help="brute-force matrix products on a truncation")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--p", type=int, required=True)
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--dims", type=_dims, default=(30, 40, 30), help="truncation M,I,J")
    p.add_argument("--coo", default=None, help="write the shift matrix as row,col,value_sq CSV")
    p.set_defaults(func=cmd_oracle)

    p = sub.add_parser("compose", parents=[common], help="composition operator equivalence")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--p", type=int, required=True)
    p.add_argument("--dims", type=_dims, default=(8, 8, 8), help="truncation M,I,J")
    p.add_argument("--coo", default=None, help="write the composition matrix as row,col,value_sq CSV")
    p.set_defaults(func=cmd_compose)
    return ap


def _finish_args(args) -> None:
    args.out = getattr(args, "out", None)
    args.format = getattr(args, "format", "json")
    args.precision = getattr(args, "precision", None) or _precision_default()
    args.terms = getattr(args, "terms", None)


def main(argv=None) -> int:
    ap = build_parser()
    args = ap.parse_args(argv)
    _finish_args(args)
    if args.precision < 16:
        print("error: precision must be at least 16 bits", file=sys.stderr)
        return EXIT_INVALID
    if args.terms is not None and args.terms < 1:
        print("error: --terms must be positive", file=sys.stderr)
        return EXIT_INVALID
    try:
        report = args.func(args)
    except Inconclusive as exc:
        _emit(exc.report, args)
        print(f"inconclusive: {exc}", file=sys.stderr)
        return EXIT_INCONCLUSIVE
    except PrecisionError as exc:
        print(f"inconclusive: {exc}", file=sys.stderr)
        return EXIT_INCONCLUSIVE
    except Disagreement as exc:
        if exc.report is not None:
            _emit(exc.report, args)
        print(f"internal disagreement: {exc}", file=sys.stderr)
        return EXIT_INTERNAL
    except (CertificateError, CrossCheckError, OffDiagonalError) as exc:
        print(f"internal disagreement: {exc}", file=sys.stderr)
        return EXIT_INTERNAL
    except NonPrimeError as exc:
        print(f"error: p not prime ({exc})", file=sys.stderr)
        return EXIT_INVALID
    except (RationalRootError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    _emit(report, args)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
