"""Estimate the convergence order of the approximation as the window shrinks.

The full quadratic solution should converge at order ~3 and the leading
(linear) part alone at order ~2.
"""

import argparse

from localpert.perturbation import compose_solution
from localpert.validation import ModelParams, convergence_order


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--p", type=float, nargs="+", default=[0.3, 0.5, 0.7])
    ap.add_argument("--n", type=int, nargs="+", default=[4, 5, 6])
    ap.add_argument("--base-window", type=float, default=0.08)
    ap.add_argument("--levels", type=int, default=4)
    args = ap.parse_args()

    print(f"{'p':>5} {'n':>3} {'full':>7} {'leading':>8}")
    for p in args.p:
        for n in args.n:
            params, sol = ModelParams(p, n), compose_solution(p, n)
            full = convergence_order(params, sol, args.base_window, args.levels)
            lead = convergence_order(params, sol.leading_only(), args.base_window, args.levels)
            print(f"{p:5.2f} {n:3d} {full.order:7.3f} {lead.order:8.3f}")


if __name__ == "__main__":
    main()
