"""Command-line entry point: ``python -m localpert <subcommand>``."""

from __future__ import annotations

import argparse
import os
import sys

from . import leading_order, perturbation, pipeline, validation

EXIT_OK, EXIT_USAGE, EXIT_IDENTITY = 0, 1, 2


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _floats(text: str) -> list[float]:
    try:
        return [float(t) for t in text.split(",") if t.strip()]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers: {text!r}") from exc


def _ints(text: str) -> list[int]:
    out = []
    for part in text.split(","):
        part = part.strip()
        if not part:
            continue
        if "-" in part[1:]:
            lo, hi = part.split("-", 1)
            out.extend(range(int(lo), int(hi) + 1))
        else:
            out.append(int(part))
    return out


def build_parser() -> argparse.ArgumentParser:
    fmt = argparse.ArgumentDefaultsHelpFormatter
    parser = _Parser(prog="localpert", description="Local perturbation analysis of the posted-price auction ODE.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    d = sub.add_parser("derive", help="replay the symbolic eps-expansion", formatter_class=fmt)
    d.add_argument("--order", type=int, default=3, help="eps truncation order before the eps^2 division (>= 3)")
    d.add_argument("--quiet", action="store_true", help="print only PASS/FAIL lines")

    le = sub.add_parser("leading", help="roots of k^3 - k^2 + 1 and the first-integral exponents", formatter_class=fmt)
    le.add_argument("--quiet", action="store_true", help="print only k")

    c = sub.add_parser("correction", help="first-order correction coefficients for given n", formatter_class=fmt)
    c.add_argument("--n", type=float, default=4.0, help="number of bidders (any real >= 3)")
    c.add_argument("--quiet", action="store_true", help="print only r")

    s = sub.add_parser("solution", help="coefficients of the composed quadratic z(v)", formatter_class=fmt)
    s.add_argument("--p", type=float, default=0.5, help="posted price, 0 < p < 1")
    s.add_argument("--n", type=float, default=4.0, help="number of bidders (>= 3)")
    s.add_argument("--rounding", choices=("exact", "paper"), default="exact", help="constants used for composition")
    s.add_argument("--quiet", action="store_true", help="print only the three coefficients")

    for name, helptext in (("validate", "compare with the integrated model ODE at one (p, n)"),
                           ("sweep", "agreement study over a (p, n) grid")):
        v = sub.add_parser(name, help=helptext, formatter_class=fmt)
        if name == "validate":
            v.add_argument("--p", type=float, default=0.5, help="posted price, 0 < p < 1")
            v.add_argument("--n", type=int, default=4, help="number of bidders (integer >= 3)")
        else:
            v.add_argument("--p-values", type=_floats, default=[0.3, 0.5, 0.7], help="comma-separated p grid")
            v.add_argument("--n-values", type=_ints, default=list(range(3, 9)), help="n grid, e.g. 3-8 or 3,5,7")
            v.add_argument("--workers", type=int, default=1, help="parallel grid cells")
            v.add_argument("--svg", default=None, help="write a sup_err-vs-n chart here")
        v.add_argument("--delta", type=float, default=1e-3, help="seed offset from the singular point")
        v.add_argument("--window", type=float, default=0.1, help="integration span in v (clipped at v = 1)")
        v.add_argument("--tol", type=float, default=1e-10, help="local error tolerance per step")
        v.add_argument("--seed-mode", choices=("approx", "paper"), default="approx",
                       help="seed on the approximate curve or at (p+delta, p-delta)")
        v.add_argument("--rounding", choices=("exact", "paper"), default="exact", help="constants of z(v)")
        v.add_argument("--csv", default=None, help="write CSV here (default: stdout for sweep)")
        v.add_argument("--quiet", action="store_true", help="suppress the summary")
    return parser


def _check_writable(path: str | None) -> None:
    if path is None:
        return
    parent = os.path.dirname(os.path.abspath(path))
    if not os.path.isdir(parent) or not os.access(parent, os.W_OK):
        raise UsageError(f"cannot write to {path}")
    if os.path.isdir(path):
        raise UsageError(f"{path} is a directory")


def _config(args) -> validation.IntegrationConfig:
    return validation.IntegrationConfig(
        delta=args.delta, window=args.window, local_tol=args.tol, seed_mode=args.seed_mode
    )


def cmd_derive(args, out) -> int:
    if args.order < 3:
        raise UsageError("--order must be >= 3")
    lines, ok = pipeline.derivation_report(args.order)
    for line in lines:
        if not args.quiet or "PASS" in line or "FAIL" in line:
            print(line, file=out)
    return EXIT_OK if ok else EXIT_IDENTITY


def cmd_leading(args, out) -> int:
    roots = leading_order.solve_leading_cubic()
    if args.quiet:
        print(f"{roots.k:.17g}", file=out)
        return EXIT_OK
    fi = leading_order.first_integral(roots)
    resid = abs(leading_order.cubic(roots.k))
    print(f"k (real root of F^3 - F^2 + 1)  = {roots.k:.12f}   (printed: {perturbation.PAPER_K})", file=out)
    print(f"complex pair                    = {roots.pair_re:.12f} +/- {roots.pair_im:.12f}i", file=out)
    print(f"|q(k)|                          = {resid:.3e}", file=out)
    print(f"ray residual k - (k^2-1)/k^2    = {leading_order.ray_residual(roots.k):.3e}", file=out)
    print(f"s1                              = {fi.s1:.12f}", file=out)
    print(f"s2 = conj(s3)                   = {fi.s2.real:.12f} {fi.s2.imag:+.12f}i", file=out)
    ok = abs(fi.residue_sum - 1) < 1e-12
    print(f"residue sum s1 + 2 Re(s2) = 1: {'PASS' if ok else 'FAIL'} ({fi.residue_sum - 1:+.3e})", file=out)
    return EXIT_OK if ok else EXIT_IDENTITY


def cmd_correction(args, out) -> int:
    if args.n < 3:
        raise UsageError("--n must be >= 3")
    n = args.n
    cc = perturbation.correction_coefficients(n)
    r = perturbation.correction_coefficient_r(n)
    r_paper = perturbation.PAPER_R_INTERCEPT + perturbation.PAPER_R_SLOPE * n
    if args.quiet:
        print(f"{r:.17g}", file=out)
        return EXIT_OK
    a_paper = perturbation.PAPER_A_CONST + perturbation.PAPER_A_N * n
    print(f"n = {n:g}", file=out)
    print(f"A(n) = {cc.A_const:.6f} + {cc.A_n:.6f} n = {cc.A:.10f}   (printed: {a_paper:.6f})", file=out)
    print(f"|1/(3k^3)| = {cc.prefactor:.6f}   (printed: {perturbation.PAPER_PREFACTOR})", file=out)
    print(f"alpha = A/(3k^3) = {cc.alpha:.10f}", file=out)
    print(f"beta = 2/k^3     = {cc.beta:.10f}", file=out)
    shown = 0.0 if abs(r) < 1e-12 else r
    print(f"r = {shown:.10f}   (printed: {r_paper:.6f})", file=out)
    return EXIT_OK


def cmd_solution(args, out) -> int:
    sol = perturbation.compose_solution(args.p, args.n, args.rounding)
    c0, c1, c2 = sol.coefficients()
    if args.quiet:
        print(f"{c0:.17g} {c1:.17g} {c2:.17g}", file=out)
        return EXIT_OK
    print(f"p = {args.p:g}, n = {args.n:g}, rounding = {args.rounding}", file=out)
    print(f"k = {sol.k:.10f}, r = {sol.r:.10f}", file=out)
    print(f"z(v) = {c0:.10f} {c1:+.10f} v {c2:+.10f} v^2", file=out)
    print(f"     = ({1 - sol.k:.6f} + r) p - ({-sol.k:.6f} + 2r) v + r v^2 / p", file=out)
    paper = perturbation.compose_solution(args.p, args.n, "paper")
    exact = perturbation.compose_solution(args.p, args.n, "exact")
    print(
        f"printed form: (7/4 + r) p - (3/4 + 2r) v + r v^2 / p with r = {paper.r:.6f}; "
        f"|1 - k - 7/4| = {abs(1 - exact.k - 1.75):.6f}",
        file=out,
    )
    return EXIT_OK


def cmd_validate(args, out) -> int:
    _check_writable(args.csv)
    params = validation.ModelParams(args.p, args.n)
    config = _config(args)
    sol = perturbation.compose_solution(args.p, args.n, args.rounding)
    traj = validation.integrate_original(params, config, sol)
    rec = validation._record(params, config, traj, sol)
    if args.csv:
        validation.write_text(args.csv, validation.trajectory_csv(traj, sol, config.delta))
    if not args.quiet:
        print(validation.sweep_csv([rec]), end="", file=out)
    return EXIT_OK


def cmd_sweep(args, out) -> int:
    _check_writable(args.csv)
    _check_writable(args.svg)
    if args.workers < 1:
        raise UsageError("--workers must be >= 1")
    config = _config(args)
    records = validation.sweep(args.p_values, args.n_values, config, args.rounding, args.workers)
    text = validation.sweep_csv(records)
    if args.csv:
        validation.write_text(args.csv, text)
    elif not args.quiet:
        print(text, end="", file=out)
    if args.svg:
        validation.write_text(args.svg, validation.sweep_svg(records))
    if args.csv and not args.quiet:
        for p in sorted({r.p for r in records}):
            errs = [r.sup_err for r in records if r.p == p]
            mono = all(a <= b for a, b in zip(errs, errs[1:]))
            print(f"p = {p:g}: sup_err nondecreasing in n: {'yes' if mono else 'no'}", file=out)
    return EXIT_OK


COMMANDS = {
    "derive": cmd_derive,
    "leading": cmd_leading,
    "correction": cmd_correction,
    "solution": cmd_solution,
    "validate": cmd_validate,
    "sweep": cmd_sweep,
}


def run(argv=None, out=None) -> int:
    out = out or sys.stdout
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return COMMANDS[args.command](args, out)
    except (UsageError, ValueError) as exc:
        print(f"localpert {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


def main() -> None:
    sys.exit(run())
