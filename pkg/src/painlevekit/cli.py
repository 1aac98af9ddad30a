"""Command-line front end: ``analyze``, ``scan``, ``series`` and ``validate``."""

from __future__ import annotations

import argparse
import logging
import sys
from fractions import Fraction
from typing import List, Optional

from .exactnum import parse_fraction
from .odeparse import Expanding, ParseError, Steady, builtin, parse_system
from .painleve import Status, UnsupportedAlgebra, VerdictKind, analyze_system
from .report import dumps, report_json, report_markdown, scan, scan_csv, scan_json, scan_markdown
from .series import materialize, to_csv
from .validate import BlowUp, conserved_check, series_vs_integration, validation_window

EXIT_OK, EXIT_INTERNAL, EXIT_USAGE, EXIT_FAIL = 0, 1, 2, 3
THRESHOLD = 1e-8

log = logging.getLogger("painlevekit")


class UsageError(Exception):
    pass


def _lam(text: str) -> Fraction:
    try:
        return parse_fraction(text)
    except ValueError as exc:
        raise UsageError(f"--lambda: {exc}") from None


def _target(args):
    """System id (builtin) or parsed system (``--file``)."""
    if getattr(args, "file", None):
        try:
            with open(args.file, encoding="utf-8") as fh:
                text = fh.read()
        except OSError as exc:
            raise UsageError(f"cannot read {args.file}: {exc.strerror}") from None
        try:
            return parse_system(text)
        except ParseError as exc:
            raise UsageError(f"{args.file}: {exc}") from None
    if not args.system:
        raise UsageError("one of --system or --file is required")
    if args.n is None:
        raise UsageError("--n is required for builtin systems")
    try:
        if args.system == "steady":
            sid = Steady(args.n)
        else:
            sid = Expanding(args.n, _lam(args.lam))
        builtin(sid)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    return sid


def _emit(text: str, out: Optional[str]):
    if out:
        with open(out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _add_system_flags(p, file_ok=True):
    p.add_argument("--system", choices=("steady", "expanding"))
    if file_ok:
        p.add_argument("--file", metavar="PATH", help="system file instead of a builtin")
    p.add_argument("--n", type=int)
    p.add_argument("--lambda", dest="lam", default="1", metavar="RAT")


def _verdict_exit(kind: VerdictKind) -> int:
    return EXIT_FAIL if kind == VerdictKind.FAIL else EXIT_OK


# -- subcommands ---------------------------------------------------------------------

def cmd_analyze(args) -> int:
    target = _target(args)
    if args.order is not None and args.order < 0:
        raise UsageError("--order must be nonnegative")
    try:
        exp_min = parse_fraction(args.exp_min)
    except ValueError as exc:
        raise UsageError(f"--exp-min: {exc}") from None
    if exp_min > -1 or args.max_den < 1:
        raise UsageError("--exp-min must be <= -1 and --max-den >= 1")
    rep = analyze_system(target, args.order, symbolic=args.symbolic, exp_min=exp_min,
                         max_den=args.max_den)
    text = dumps(report_json(rep)) if args.format == "json" else report_markdown(rep)
    _emit(text, args.out)
    return _verdict_exit(rep.verdict.kind)


def cmd_scan(args) -> int:
    if args.system is None:
        raise UsageError("--system is required")
    if args.n_min < 1 or args.n_max < args.n_min:
        raise UsageError(f"empty range [{args.n_min}, {args.n_max}]")
    lam = str(_lam(args.lam)) if args.system == "expanding" else "1"
    rows = scan(args.system, args.n_min, args.n_max, lam)
    if args.format == "json":
        text = dumps(scan_json(rows))
    elif args.format == "csv":
        text = scan_csv(rows)
    else:
        text = scan_markdown(rows)
    _emit(text, args.out)
    return EXIT_OK


def _params(specs: List[str]) -> dict:
    out = {}
    for spec in specs or []:
        name, sep, val = spec.partition("=")
        if not sep or not name.strip():
            raise UsageError(f"--param expects NAME=RAT, got {spec!r}")
        try:
            out[name.strip()] = parse_fraction(val.strip())
        except ValueError as exc:
            raise UsageError(f"--param {spec}: {exc}") from None
    return out


def _branch_series(rep, label, order, given):
    try:
        br = rep.branch(label)
    except KeyError:
        labels = ", ".join(b.label for b in rep.branches)
        raise UsageError(f"unknown branch {label!r}; available: {labels}") from None
    if br.status == Status.IRRATIONAL_RESONANCE:
        raise UsageError(f"branch {label!r} has an irrational resonance; no series exists")
    if br.coeffs.halted_at is not None and order > br.coeffs.last_step:
        raise UsageError(f"branch {label!r} is incompatible at step {br.coeffs.halted_at}; "
                         f"series available through step {br.coeffs.last_step}")
    names = br.coeffs.param_names
    unknown = sorted(set(given) - set(names))
    if unknown:
        raise UsageError(f"unknown parameter(s) {', '.join(unknown)}; branch has "
                         f"{', '.join(names) or 'none'}")
    values = {p: given.get(p, Fraction(1)) for p in names}
    return br, materialize(br, values, order)


def _max_step(target, label) -> int:
    rep = analyze_system(target, minimal_order=True)
    for b in rep.branches:
        if b.label == label:
            return max([r.step for r in b.resonances if r.step is not None] + [0])
    return 0


def cmd_series(args) -> int:
    target = _target(args)
    if args.order < 0:
        raise UsageError("--order must be nonnegative")
    given = _params(args.param)
    rep = analyze_system(target, max(args.order, _max_step(target, args.branch)))
    _, s = _branch_series(rep, args.branch, args.order, given)
    _emit(to_csv(s), args.out)
    return EXIT_OK


def _window(text: Optional[str]):
    if not text:
        return None
    try:
        a, b = (float(x) for x in text.split(","))
    except ValueError:
        raise UsageError(f"--window expects A,B, got {text!r}") from None
    if not 0 < a < b:
        raise UsageError("--window needs 0 < A < B")
    return a, b


def _distinct(branches):
    """Drop branches that only re-grid another branch (same balance, larger Q)."""
    out = []
    for b in branches:
        bal = b.balance
        if any(o is not b and o.balance.exponents == bal.exponents
               and o.balance.leading_coeffs == bal.leading_coeffs and o.balance.Q < bal.Q
               for o in branches):
            continue
        out.append(b)
    return out


def cmd_validate(args) -> int:
    target = _target(args)
    if args.order < 0:
        raise UsageError("--order must be nonnegative")
    if not 1e-14 <= args.tol <= 1e-6:
        raise UsageError("--tol must lie in [1e-14, 1e-6]")
    window = _window(args.window)
    given = _params(args.param)
    top = max((_max_step(target, b) for b in ([args.branch] if args.branch else [])), default=0)
    if not args.branch:
        pre = analyze_system(target, minimal_order=True)
        top = max([r.step for b in pre.branches for r in b.resonances if r.step is not None] + [0])
    rep = analyze_system(target, max(args.order, top))
    if args.branch:
        labels = [args.branch]
    else:
        labels = [b.label for b in _distinct(rep.branches)
                  if b.status in (Status.FULL_FAMILY, Status.PARTIAL_FAMILY)]
    if not labels:
        print("no branch admits a series to validate")
        return EXIT_FAIL
    conserved = None
    if isinstance(target, Steady):
        cons = conserved_check(target, tol=args.tol)
        if cons.symbolic_zero:
            conserved = cons.conserved
            print(f"conservation: x + y symbolic sum {cons.symbolic_sum}, drift {cons.drift:.3e}")
    ok = conserved is not False
    for label in labels:
        br, s = _branch_series(rep, label, args.order, given)
        w = window or validation_window(s)
        try:
            dev = series_vs_integration(rep.system, s, w[0], w[1], args.tol,
                                        check_radius=window is None)
        except BlowUp as exc:
            print(f"{label}: {exc}")
            ok = False
            continue
        passed = dev < THRESHOLD
        ok &= passed
        params = ", ".join(f"{p}={v}" for p, v in s.param_values) or "none"
        print(f"{label}: window [{w[0]:.6g}, {w[1]:.6g}], order {args.order}, params {params}, "
              f"deviation {dev:.3e} {'pass' if passed else 'FAIL'}")
        rep.validation.append({"branch": label, "window": [w[0], w[1]], "order": args.order,
                               "deviation": dev, "conserved": conserved})
    if args.out:
        _emit(dumps(report_json(rep)), args.out)
    return EXIT_OK if ok else EXIT_FAIL


# -- entry point -----------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="painlevekit",
                                 description="Exact Painleve test for polynomial ODE systems.")
    ap.add_argument("-v", "--verbose", action="store_true")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("analyze", help="analyse one system")
    _add_system_flags(p)
    p.add_argument("--order", type=int)
    p.add_argument("--out", metavar="PATH")
    p.add_argument("--format", choices=("json", "md"), default="json")
    p.add_argument("--symbolic", action="store_true",
                   help="decide compatibility by exact elimination instead of sampling")
    p.add_argument("--exp-min", default="-1", metavar="RAT",
                   help="most singular exponent tried for --file systems")
    p.add_argument("--max-den", type=int, default=2,
                   help="largest exponent denominator tried for --file systems")
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("scan", help="classify a range of dimensions")
    _add_system_flags(p, file_ok=False)
    p.add_argument("--n-min", type=int, required=True)
    p.add_argument("--n-max", type=int, required=True)
    p.add_argument("--out", metavar="PATH")
    p.add_argument("--format", choices=("json", "csv", "md"), default="md")
    p.set_defaults(func=cmd_scan)

    p = sub.add_parser("series", help="write the series coefficients as CSV")
    _add_system_flags(p)
    p.add_argument("--branch", required=True)
    p.add_argument("--order", type=int, default=20)
    p.add_argument("--param", action="append", metavar="NAME=RAT")
    p.add_argument("--out", metavar="PATH")
    p.set_defaults(func=cmd_series)

    p = sub.add_parser("validate", help="compare series with numerical integration")
    _add_system_flags(p)
    p.add_argument("--branch")
    p.add_argument("--order", type=int, default=40)
    p.add_argument("--tol", type=float, default=1e-12)
    p.add_argument("--window", metavar="A,B")
    p.add_argument("--param", action="append", metavar="NAME=RAT")
    p.add_argument("--out", metavar="PATH")
    p.set_defaults(func=cmd_validate)
    return ap


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_OK
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except UnsupportedAlgebra as exc:
        print(f"unsupported: {exc}", file=sys.stderr)
        return EXIT_INTERNAL
    except Exception as exc:  # noqa: BLE001 - last-resort exit code
        log.debug("internal error", exc_info=True)
        print(f"internal error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_INTERNAL


if __name__ == "__main__":
    sys.exit(main())
