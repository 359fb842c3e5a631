"""Leading-order equation dY/dX = (Y^2 - X^2)/Y^2.

The ray Y = kX solves it when k^3 = k^2 - 1.  The general solution is kept
implicit as a first integral Phi(X, Y), which we use as an oracle for the
numeric integrator.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy.integrate import solve_ivp


def cubic(F: complex) -> complex:
    """q(F) = F^3 - F^2 + 1."""
    return F ** 3 - F ** 2 + 1


def cubic_prime(F: complex) -> complex:
    return 3 * F ** 2 - 2 * F


@dataclass(frozen=True)
class CubicRoots:
    k: float
    pair_re: float
    pair_im: float

    @property
    def pair(self) -> complex:
        return complex(self.pair_re, self.pair_im)

    def all(self) -> tuple[complex, complex, complex]:
        return (complex(self.k), self.pair, self.pair.conjugate())


@dataclass(frozen=True)
class FirstIntegral:
    """Residue weights s_i = r_i^2 / q'(r_i); s3 is the conjugate of s2."""

    roots: CubicRoots
    s1: float
    s2: complex

    @property
    def residue_sum(self) -> float:
        return self.s1 + 2 * self.s2.real


def _bisect(f, lo: float, hi: float, iters: int = 200) -> float:
    flo, fhi = f(lo), f(hi)
    if flo * fhi > 0:
        raise ValueError(f"no sign change on [{lo}, {hi}]")
    for _ in range(iters):
        mid = 0.5 * (lo + hi)
        fm = f(mid)
        if fm == 0 or hi - lo < 1e-15:
            return mid
        if (fm < 0) == (flo < 0):
            lo, flo = mid, fm
        else:
            hi = mid
    return 0.5 * (lo + hi)


@lru_cache(maxsize=None)
def solve_leading_cubic() -> CubicRoots:
    """Real root by bisection on (-0.76, -0.75) + Newton polish; pair from the deflated quadratic."""
    k = _bisect(lambda F: cubic(F).real, -0.76, -0.75, iters=60)
    for _ in range(5):
        step = cubic(k) / cubic_prime(k)
        k -= step
        if abs(step) < 1e-17:
            break
    k = float(k)
    # F^3 - F^2 + 1 = (F - k)(F^2 + bF + c)
    b = k - 1.0
    c = -1.0 / k
    disc = b * b - 4 * c
    re = -b / 2
    im = math.sqrt(-disc) / 2
    return CubicRoots(k=k, pair_re=re, pair_im=im)


def first_integral(roots: CubicRoots | None = None) -> FirstIntegral:
    roots = roots or solve_leading_cubic()
    r1, r2, _ = roots.all()
    s1 = (r1 ** 2 / cubic_prime(r1)).real
    s2 = r2 ** 2 / cubic_prime(r2)
    return FirstIntegral(roots=roots, s1=s1, s2=s2)


def ray_residual(k_candidate: float) -> float:
    if k_candidate == 0:
        raise ZeroDivisionError("ray slope must be nonzero")
    return k_candidate - (k_candidate ** 2 - 1) / k_candidate ** 2


def conserved_quantity(X: float, Y: float, fi: FirstIntegral | None = None) -> float:
    """Phi = X |F-r1|^s1 exp(2 Re(s2 log(F-r2))), F = Y/X; constant on solutions."""
    if X == 0:
        raise ZeroDivisionError("Phi is undefined at X = 0")
    fi = fi or first_integral()
    F = Y / X
    d1 = abs(F - fi.roots.k)
    if d1 == 0:
        return 0.0
    pair = 2 * (fi.s2 * cmath.log(F - fi.roots.pair)).real
    return X * d1 ** fi.s1 * math.exp(pair)


class SingularCrossing(RuntimeError):
    """The trajectory reached Y = 0 where the right-hand side blows up."""

    def __init__(self, X: float):
        self.X = X
        super().__init__(f"Y reached 0 at X = {X:.17g}")


def leading_rhs(X: float, Y: float) -> float:
    return (Y * Y - X * X) / (Y * Y)


def integrate_leading(X0: float, Y0: float, X1: float, tol: float = 1e-10) -> list[tuple[float, float]]:
    """Adaptive 8(5,3) integration of the leading-order equation, samples at accepted steps."""
    if Y0 == 0:
        raise ValueError("Y0 must be nonzero")
    if tol <= 0:
        raise ValueError("tol must be positive")
    if X0 == X1:
        return [(X0, Y0)]
    if X0 == 0 or X1 == 0 or (X0 > 0) != (X1 > 0):
        raise ValueError("X0 and X1 must be nonzero with the same sign")

    def hit_zero(X, Y):
        return Y[0]

    hit_zero.terminal = True

    sol = solve_ivp(
        lambda X, Y: [leading_rhs(X, Y[0])],
        (X0, X1),
        [Y0],
        method="DOP853",
        rtol=tol,
        atol=tol * 1e-3,
        events=hit_zero,
    )
    if sol.status == 1 or sol.status == -1:
        raise SingularCrossing(float(sol.t[-1]))
    return list(zip(sol.t.tolist(), sol.y[0].tolist()))


def drift(samples: list[tuple[float, float]], fi: FirstIntegral | None = None) -> float:
    """Max relative change of Phi over a trajectory."""
    fi = fi or first_integral()
    phi = np.array([conserved_quantity(X, Y, fi) for X, Y in samples])
    ref = phi[0]
    return float(np.max(np.abs(phi - ref)) / abs(ref))
