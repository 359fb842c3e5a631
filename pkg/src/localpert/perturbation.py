"""First correction along the ray and the composed quadratic approximation.

Along y0 = k x the correction obeys the linear ODE

    y1' = alpha(n) x + beta y1 / x,   alpha = A(n)/(3k^3),  beta = 2/k^3,

whose solution bounded at x -> 0+ is y1 = r x^2 with r = A(n)/(6(k^3 - 1)).
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np
from scipy.integrate import solve_ivp

from .leading_order import solve_leading_cubic

# rounded constants printed in the source derivation
PAPER_K = -0.7549
PAPER_A_CONST = -8.684
PAPER_A_N = 2.895
PAPER_PREFACTOR = 0.775
PAPER_R_INTERCEPT = 1.012
PAPER_R_SLOPE = -0.3373
PAPER_ONE_MINUS_K = 7 / 4
PAPER_MINUS_K = 3 / 4


def _k(k: float | None) -> float:
    return solve_leading_cubic().k if k is None else k


@dataclass(frozen=True)
class CorrectionCoefficients:
    n: float
    k: float
    A_const: float
    A_n: float
    alpha: float
    beta: float

    @property
    def A(self) -> float:
        return self.A_const + self.A_n * self.n

    @property
    def prefactor(self) -> float:
        """|1/(3k^3)|."""
        return abs(1 / (3 * self.k ** 3))


def correction_coefficients(n: float, k: float | None = None) -> CorrectionCoefficients:
    if n < 3:
        raise ValueError(f"n must be >= 3, got {n}")
    k = _k(k)
    A_const = 6 * k - 9 * k ** 2 + 3 * k ** 4
    A_n = -2 * k + 3 * k ** 2 - k ** 4
    A = A_const + A_n * n
    return CorrectionCoefficients(
        n=n, k=k, A_const=A_const, A_n=A_n, alpha=A / (3 * k ** 3), beta=2 / k ** 3
    )


def correction_coefficient_r(n: float, k: float | None = None) -> float:
    k = _k(k)
    cc = correction_coefficients(n, k)
    return cc.A / (6 * (k ** 3 - 1))


def correction_residual(n: float, x: float, k: float | None = None) -> float:
    """y1' - rhs for y1 = r x^2 plugged into the correction ODE (p = 1)."""
    k = _k(k)
    r = correction_coefficient_r(n, k)
    y0 = k * x
    forcing = ((6 - 2 * n) * x ** 3 * y0 + (3 * n - 9) * x ** 2 * y0 ** 2 + (3 - n) * y0 ** 4) / (3 * y0 ** 3)
    gain = 2 * x ** 2 / y0 ** 3
    return 2 * r * x - (forcing + gain * r * x ** 2)


def integrate_correction(n: float, x0: float, x1: float, seed: float, tol: float = 1e-12, k: float | None = None):
    """Integrate y1' = alpha x + beta y1/x from (x0, seed); returns (xs, y1s)."""
    cc = correction_coefficients(n, _k(k))
    sol = solve_ivp(
        lambda x, y: [cc.alpha * x + cc.beta * y[0] / x],
        (x0, x1),
        [seed],
        method="DOP853",
        rtol=tol,
        atol=1e-300,
        dense_output=True,
    )
    xs = np.unique(np.concatenate([sol.t, np.geomspace(x0, x1, 200)]))
    return xs, sol.sol(xs)[0]


def verify_particular(
    n: float, x0: float = 1e-4, x1: float = 0.1, tol: float = 1e-12, k: float | None = None, seed_scale: float = 1.0
) -> float:
    """Max relative deviation of the integrated correction from r x^2 (absolute when r = 0)."""
    if not 0 < x0 < x1:
        raise ValueError("need 0 < x0 < x1")
    if tol <= 0:
        raise ValueError("tol must be positive")
    r = correction_coefficient_r(n, k)
    xs, ys = integrate_correction(n, x0, x1, seed_scale * r * x0 ** 2, tol, k)
    exact = r * xs ** 2
    if r == 0 or abs(r) < 1e-14:
        return float(np.max(np.abs(ys)))
    return float(np.max(np.abs(ys - exact) / np.abs(exact)))


def fit_r_line(ns=range(3, 9), k: float | None = None) -> tuple[float, float]:
    """Least-squares (intercept, slope) of r over the given n."""
    ns = np.asarray(list(ns), dtype=float)
    rs = np.array([correction_coefficient_r(v, k) for v in ns])
    slope, intercept = np.polyfit(ns, rs, 1)
    return float(intercept), float(slope)


@dataclass(frozen=True)
class ApproxSolution:
    """z(v) = p + k (v-p) + r (v-p)^2 / p."""

    p: float
    n: float
    k: float
    r: float
    rounding: str = "exact"

    @property
    def constant(self) -> float:
        return self.p * (1 - self.k + self.r)

    @property
    def linear(self) -> float:
        return self.k - 2 * self.r

    @property
    def quadratic(self) -> float:
        return self.r / self.p

    def coefficients(self) -> tuple[float, float, float]:
        return self.constant, self.linear, self.quadratic

    def evaluate(self, v):
        X = np.asarray(v, dtype=float) - self.p
        out = self.p + self.k * X + self.r * X * X / self.p
        return float(out) if np.ndim(out) == 0 else out

    def slope(self, v):
        return self.k + 2 * self.r * (np.asarray(v, dtype=float) - self.p) / self.p

    def in_domain(self, v: float) -> bool:
        return self.p < v < 1

    def leading_only(self) -> "ApproxSolution":
        return replace(self, r=0.0)


def compose_solution(p: float, n: float, rounding: str = "exact") -> ApproxSolution:
    if not 0 < p < 1:
        raise ValueError(f"p must lie in (0, 1), got {p}")
    if n < 3:
        raise ValueError(f"n must be >= 3, got {n}")
    if rounding == "exact":
        k = solve_leading_cubic().k
        return ApproxSolution(p=p, n=n, k=k, r=correction_coefficient_r(n, k))
    if rounding == "paper":
        # 7/4 + r, 3/4 + 2r: the printed composition corresponds to k = -3/4
        r = PAPER_R_INTERCEPT + PAPER_R_SLOPE * n
        return ApproxSolution(p=p, n=n, k=-PAPER_MINUS_K, r=r, rounding="paper")
    raise ValueError(f"unknown rounding {rounding!r}")


def evaluate(sol: ApproxSolution, v):
    return sol.evaluate(v)
