"""Command-line front end.

Exit codes: 0 success, 1 domain error, 2 verification failure,
3 unconverged or inconclusive, 64 usage error.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from dataclasses import dataclass
from typing import Sequence

from . import cubic, cuberoot, exactnum, mthroot, polyroot, verify
from .errors import DomainError, UnresolvedComparison, VerificationFailure
from .report import ConvergenceReport, FLOAT_BITS, fit_rate, fixed_json, to_csv, to_json, to_text

EXIT_OK, EXIT_DOMAIN, EXIT_VERIFY, EXIT_UNCONVERGED, EXIT_USAGE = 0, 1, 2, 3, 64
UNCONVERGED = {"unconverged", "inconclusive", "oscillating", "diverged", "structural-failure"}


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _int_or_auto(text: str):
    if text == "auto":
        return "auto"
    try:
        return int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected an integer or 'auto', got {text!r}") from None


def _int_list(text: str) -> tuple[int, ...]:
    try:
        return tuple(int(x) for x in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from None


def _int_range(text: str) -> range:
    """'lo:hi' inclusive, or a single integer."""
    try:
        lo, _, hi = text.partition(":")
        return range(int(lo), int(hi or lo) + 1)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected lo:hi, got {text!r}") from None


def _positive(text: str) -> int:
    try:
        v = int(text)
    except ValueError:
        v = 0
    if v <= 0:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {text!r}")
    return v


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--precision-bits", type=_positive, default=256,
                        help="bits for error measurement (default 256)")
    common.add_argument("--format", choices=("json", "csv", "text"), default="text")
    common.add_argument("--seed", type=int, default=0, help="seed for randomized grids")

    p = _Parser(prog="khovanskii", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    c = sub.add_parser("cbrt", parents=[common], help="cube root of an integer")
    c.add_argument("--alpha", type=int, required=True)
    c.add_argument("--a", type=_int_or_auto, default="auto", help="shift, or 'auto' for the optimal one")
    c.add_argument("--iters", type=_positive, default=40)

    c = sub.add_parser("cubic", parents=[common], help="real root of x^3 - p x - q or a general cubic")
    c.add_argument("--p", type=int)
    c.add_argument("--q", type=int)
    c.add_argument("--general", type=_int_list, metavar="a,b,c,d", help="a x^3 + b x^2 + c x + d")
    c.add_argument("--iters", type=_positive, default=40)

    c = sub.add_parser("mthroot", parents=[common], help="m-th root of an integer")
    c.add_argument("--alpha", type=int, required=True)
    c.add_argument("--m", type=int, required=True)
    c.add_argument("--a", type=_int_or_auto, default="auto", help="shift, or 'auto' for ceil(alpha^(1/m))")
    c.add_argument("--iters", type=_positive, default=mthroot.DEFAULT_MAX_N, help="largest power n")
    c.add_argument("--target-bits", type=_positive, default=64)

    c = sub.add_parser("polyroot", parents=[common], help="real root of a polynomial via the (k,l) matrix")
    c.add_argument("--coeffs", type=_int_list, required=True, metavar="a0,...,am")
    c.add_argument("--k", type=int)
    c.add_argument("--l", type=int)
    c.add_argument("--scan", action="store_true", help="scan a (k,l) grid instead of one pair")
    c.add_argument("--k-range", type=_int_range, default=range(1, 9), metavar="LO:HI")
    c.add_argument("--l-range", type=_int_range, default=range(1, 3), metavar="LO:HI")
    c.add_argument("--iters", type=_positive, default=4096, help="largest power n")
    c.add_argument("--agree-bits", type=_positive, default=48)

    c = sub.add_parser("verify", parents=[common], help="run verification suites")
    c.add_argument("--suite", choices=(*verify.SUITES, "all"), default="all")

    sub.add_parser("bench", parents=[common], help="fitted versus predicted convergence rates")
    return p


@dataclass
class Outcome:
    text: str
    code: int


def _emit_report(report: ConvergenceReport, fmt: str) -> Outcome:
    if fmt == "json":
        text = json.dumps(to_json(report), indent=2) + "\n"
    elif fmt == "csv":
        text = to_csv(report)
    else:
        text = to_text(report)
    return Outcome(text, EXIT_UNCONVERGED if report.status in UNCONVERGED else EXIT_OK)


def run_cbrt(args) -> Outcome:
    extra = {}
    if args.a == "auto":
        opt = cuberoot.optimal_a(args.alpha)
        a = opt.chosen
        extra = {"a_choice": "optimal", "candidates": list(opt.candidates),
                 "abar": fixed_json(opt.abar, 20), "h": fixed_json(opt.h_at_chosen, 20)}
    else:
        a = args.a
    rep = cuberoot.convergence_report(args.alpha, a, args.iters, args.precision_bits)
    rep.extra.update(extra)
    k = cuberoot.exact_cube_root(args.alpha)
    if k is not None:
        rep.extra["exact_root"] = k
    return _emit_report(rep, args.format)


def run_cubic(args) -> Outcome:
    if args.general is not None:
        if args.p is not None or args.q is not None:
            raise UsageError("use either --p/--q or --general, not both")
        if len(args.general) != 4:
            raise UsageError("--general needs exactly four coefficients a,b,c,d")
        target = cubic.GeneralCubic(*args.general)
    else:
        if args.p is None or args.q is None:
            raise UsageError("cubic needs --p and --q, or --general a,b,c,d")
        target = cubic.CubicProblem(args.p, args.q)
    return _emit_report(cubic.convergence_report(target, args.iters, args.precision_bits), args.format)


def run_mthroot(args) -> Outcome:
    a = mthroot.heuristic_a(args.alpha, args.m) if args.a == "auto" else args.a
    prob = mthroot.MthRootProblem(args.alpha, args.m, a)
    _, rep = mthroot.approximate_root(prob, args.target_bits, max_n=args.iters,
                                      precision_bits=args.precision_bits)
    if args.a == "auto":
        rep.extra["a_choice"] = "heuristic ceil(alpha^(1/m)), not an optimality claim"
    return _emit_report(rep, args.format)


def _scan_table(coeffs, cells, fmt: str) -> str:
    rows = []
    for c in cells:
        lv = c.result
        rows.append({
            "k": c.k, "l": c.l, "outcome": lv.outcome.value, "n": lv.n,
            "root": None if not lv.converged else exactnum.decimal_str(lv.root, 20),
            "residual": None if lv.residual is None else
            {"value": f"{float(lv.residual):.3e}", "precision_bits": lv.residual.bits},
        })
    if fmt == "json":
        status = "converged" if any(c.result.converged for c in cells) else "unconverged"
        return json.dumps({"problem": {"coeffs": list(coeffs)}, "method": "parameter scan",
                           "rows": rows, "rate_estimate": None, "status": status}, indent=2) + "\n"
    buf = io.StringIO()
    if fmt == "csv":
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(("k", "l", "outcome", "n", "root", "residual"))
        for r in rows:
            w.writerow((r["k"], r["l"], r["outcome"], r["n"], r["root"] or "",
                        "" if r["residual"] is None else r["residual"]["value"]))
        return buf.getvalue()
    buf.write(f"parameter scan for coeffs {list(coeffs)}\n")
    buf.write(f"{'k':>4} {'l':>4}  {'outcome':<20} {'n':>6}  root\n")
    for r in rows:
        buf.write(f"{r['k']:>4} {r['l']:>4}  {r['outcome']:<20} {r['n']:>6}  {r['root'] or '-'}\n")
    return buf.getvalue()


def run_polyroot(args) -> Outcome:
    if args.scan:
        cells = polyroot.parameter_scan(args.coeffs, args.k_range, args.l_range,
                                        max_n=args.iters, agree_bits=args.agree_bits)
        code = EXIT_OK if any(c.result.converged for c in cells) else EXIT_UNCONVERGED
        return Outcome(_scan_table(args.coeffs, cells, args.format), code)
    if args.k is None or args.l is None:
        raise UsageError("polyroot needs --k and --l, or --scan")
    prob = polyroot.GeneralPolyProblem(args.coeffs, args.k, args.l)
    rep = polyroot.convergence_report(prob, max_n=args.iters, agree_bits=args.agree_bits,
                                      precision_bits=args.precision_bits)
    return _emit_report(rep, args.format)


def run_verify(args) -> Outcome:
    results = verify.run_suites(args.suite, args.seed)
    failed = any(not r.ok for r in results)
    if args.format == "json":
        text = json.dumps({
            "seed": args.seed,
            "suites": [{"name": r.name, "checks": r.checks, "failures": r.failures, "notes": r.notes}
                       for r in results],
            "status": "FAIL" if failed else "ok",
        }, indent=2) + "\n"
    elif args.format == "csv":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(("suite", "checks", "failures", "status"))
        for r in results:
            w.writerow((r.name, r.checks, len(r.failures), "ok" if r.ok else "FAIL"))
        text = buf.getvalue()
    else:
        text = verify.render(results, args.seed)
    return Outcome(text, EXIT_VERIFY if failed else EXIT_OK)


def bench_rows(precision_bits: int = 256) -> list[dict]:
    """One row per problem: predicted geometric rate against the fitted one."""
    out = []
    for alpha in verify.CUBE_ALPHAS:
        opt = cuberoot.optimal_a(alpha)
        rep = cuberoot.convergence_report(alpha, opt.chosen, 60, precision_bits)
        fitted = fit_rate((r.n, r.abs_error) for r in rep.rows if r.n >= 24)
        out.append({"problem": f"cbrt alpha={alpha} a={opt.chosen}",
                    "predicted": float(opt.predicted_rate), "fitted": fitted, "window": "n=24..60"})
    for p, q in verify.CUBIC_PAIRS:
        prob = cubic.CubicProblem(p, q)
        rep = cubic.convergence_report(prob, 60, precision_bits)
        fitted = fit_rate((r.n, r.abs_error) for r in rep.rows if r.n >= 24)
        out.append({"problem": f"cubic p={p} q={q}", "predicted": float(cubic.predicted_rate(prob)),
                    "fitted": fitted, "window": "n=24..60"})
    for m in (4, 5, 6):
        for alpha in (2, 10, 50):
            prob = mthroot.MthRootProblem(alpha, m, mthroot.heuristic_a(alpha, m))
            _, rep = mthroot.approximate_root(prob, 64, precision_bits=precision_bits)
            out.append({"problem": f"mthroot m={m} alpha={alpha} a={prob.a}",
                        "predicted": float(rep.predicted_rate), "fitted": rep.rate_estimate,
                        "window": "final third, n doubling"})
    return out


def run_bench(args) -> Outcome:
    rows = bench_rows(args.precision_bits)
    for r in rows:
        r["ratio"] = None if r["fitted"] is None else r["fitted"] / r["predicted"]
    if args.format == "json":
        def num(x):
            return None if x is None else {"value": f"{x:.6g}", "precision_bits": FLOAT_BITS}
        text = json.dumps({"benchmarks": [{"problem": r["problem"], "window": r["window"],
                                           "predicted_rate": num(r["predicted"]),
                                           "fitted_rate": num(r["fitted"]), "ratio": num(r["ratio"])}
                                          for r in rows], "status": "ok"}, indent=2) + "\n"
    elif args.format == "csv":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(("problem", "predicted_rate", "fitted_rate", "ratio", "window"))
        for r in rows:
            w.writerow((r["problem"], f"{r['predicted']:.6g}", "" if r["fitted"] is None else f"{r['fitted']:.6g}",
                        "" if r["ratio"] is None else f"{r['ratio']:.4f}", r["window"]))
        text = buf.getvalue()
    else:
        lines = [f"{'problem':<32} {'predicted':>10} {'fitted':>10} {'ratio':>7}"]
        for r in rows:
            fitted = "-" if r["fitted"] is None else f"{r['fitted']:.6f}"
            ratio = "-" if r["ratio"] is None else f"{r['ratio']:.4f}"
            lines.append(f"{r['problem']:<32} {r['predicted']:>10.6f} {fitted:>10} {ratio:>7}")
        text = "\n".join(lines) + "\n"
    return Outcome(text, EXIT_OK)


COMMANDS = {
    "cbrt": run_cbrt,
    "cubic": run_cubic,
    "mthroot": run_mthroot,
    "polyroot": run_polyroot,
    "verify": run_verify,
    "bench": run_bench,
}


LIST_FLAGS = ("--coeffs", "--general", "--k-range", "--l-range")


def _glue_list_flags(argv: Sequence[str]) -> list[str]:
    """``--coeffs -1,0,1`` -> ``--coeffs=-1,0,1`` so a leading minus is not read as a flag."""
    out, it = [], iter(argv)
    for tok in it:
        if tok in LIST_FLAGS:
            nxt = next(it, None)
            out.append(tok if nxt is None else f"{tok}={nxt}")
        else:
            out.append(tok)
    return out


def run(argv: Sequence[str] | None = None) -> Outcome:
    parser = build_parser()
    args = parser.parse_args(_glue_list_flags(sys.argv[1:] if argv is None else argv))
    try:
        return COMMANDS[args.command](args)
    except UsageError as exc:
        return Outcome(f"khovanskii {args.command}: usage error: {exc}\n", EXIT_USAGE)
    except DomainError as exc:
        return Outcome(f"domain error: {exc}\n", EXIT_DOMAIN)
    except VerificationFailure as exc:
        return Outcome(f"verification failure: {exc}\n", EXIT_VERIFY)
    except UnresolvedComparison as exc:
        return Outcome(f"inconclusive: {exc}\n", EXIT_UNCONVERGED)


def main(argv: Sequence[str] | None = None) -> int:
    try:
        out = run(argv)
    except SystemExit as exc:  # argparse usage errors and --help
        return exc.code if isinstance(exc.code, int) else EXIT_USAGE
    stream = sys.stdout if out.code in (EXIT_OK, EXIT_UNCONVERGED, EXIT_VERIFY) else sys.stderr
    stream.write(out.text)
    return out.code


if __name__ == "__main__":
    sys.exit(main())
