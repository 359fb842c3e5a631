import numpy as np
import pytest
from hypothesis import given, strategies as st
from scipy.integrate import solve_ivp

from localpert.leading_order import solve_leading_cubic
from localpert.perturbation import (
    compose_solution,
    correction_coefficient_r,
    correction_coefficients,
    correction_residual,
    evaluate,
    fit_r_line,
    integrate_correction,
    verify_particular,
)

K = solve_leading_cubic().k


def test_a_coefficients():
    cc = correction_coefficients(5)
    assert cc.A_const == pytest.approx(-8.684, abs=1e-3)
    assert cc.A_n == pytest.approx(2.895, abs=1e-3)


def test_prefactor():
    assert correction_coefficients(4).prefactor == pytest.approx(0.775, abs=1e-3)


def test_beta():
    cc = correction_coefficients(4)
    assert cc.beta == pytest.approx(2 / K ** 3, rel=1e-15)
    assert cc.beta == pytest.approx(-4.649, abs=1e-3)


def test_a_vanishes_at_3():
    assert abs(correction_coefficients(3).A) < 1e-12


def test_rejects_small_n():
    with pytest.raises(ValueError):
        correction_coefficients(2.5)


def test_r_at_3():
    assert abs(correction_coefficient_r(3)) < 1e-12


def test_r_line():
    intercept, slope = fit_r_line()
    assert intercept == pytest.approx(1.012, abs=5e-4)
    assert slope == pytest.approx(-0.3373, abs=5e-4)
    assert intercept == pytest.approx(1.01197, abs=1e-5)
    assert slope == pytest.approx(-0.337324, abs=1e-6)


def test_r_collinear():
    r3, r5, r9 = (correction_coefficient_r(n) for n in (3, 5, 9))
    assert abs((r5 - r3) / 2 - (r9 - r3) / 6) < 1e-12


def _r_by_integration(n, x0=1e-6, x1=1e-3):
    """Independent oracle: any seed is pulled onto r x^2 since x^beta decays for x > x0."""
    cc = correction_coefficients(n)
    sol = solve_ivp(lambda x, y: [cc.alpha * x + cc.beta * y[0] / x], (x0, x1), [0.0],
                    method="Radau", rtol=1e-12, atol=1e-30, dense_output=True)
    xs = np.geomspace(x1 / 4, x1, 20)
    ys = sol.sol(xs)[0]
    ratio = ys / xs ** 2
    # least squares for y = r x^2
    r_ls = float(np.dot(ys, xs ** 2) / np.dot(xs ** 2, xs ** 2))
    return ratio, r_ls


def test_r5_by_integration():
    ratio, r_ls = _r_by_integration(5)
    assert np.ptp(ratio) < 1e-8
    assert r_ls == pytest.approx(-0.6746469, abs=1e-7)
    assert r_ls == pytest.approx(-0.674650, abs=5e-6)
    assert correction_coefficient_r(5) == pytest.approx(r_ls, abs=1e-8)


@given(st.floats(3, 10), st.floats(1e-4, 0.1))
def test_residual_identity(n, x):
    y0 = K * x
    forcing = ((6 - 2 * n) * x ** 3 * y0 + (3 * n - 9) * x ** 2 * y0 ** 2 + (3 - n) * y0 ** 4) / (3 * y0 ** 3)
    scale = max(abs(forcing), abs(x))
    assert abs(correction_residual(n, x)) < 1e-10 * scale


@pytest.mark.parametrize("n", [4, 5, 6, 8])
def test_particular_solution(n):
    assert verify_particular(n, 1e-4, 0.1) < 1e-6


def test_particular_n3_stays_zero():
    assert verify_particular(3, 1e-4, 0.1) < 1e-10


def test_perturbed_seed_decays():
    n = 5
    r = correction_coefficient_r(n)
    x0 = 1e-4
    xs, ys = integrate_correction(n, x0, 0.1, 1.1 * r * x0 ** 2)
    dev = np.abs(ys - r * xs ** 2) / np.abs(r * xs ** 2)
    assert dev[0] == pytest.approx(0.1, rel=1e-9)
    assert dev[-1] < 1e-6
    early, late = dev[xs < 2e-4], dev[xs > 1e-3]
    assert early.min() > late.max()


def test_verify_particular_bad_range():
    with pytest.raises(ValueError):
        verify_particular(4, 0.1, 0.01)


@given(st.floats(0.05, 0.95), st.floats(3, 10))
def test_solution_passes_through_singular_point(p, n):
    sol = compose_solution(p, n)
    assert abs(sol.evaluate(p) - p) < 1e-14
    assert abs(sol.slope(p) - sol.k) < 1e-14


def test_n3_solution_is_linear():
    sol = compose_solution(0.5, 3)
    c0, c1, c2 = sol.coefficients()
    assert c0 == pytest.approx(0.877439, abs=1e-6)
    assert c1 == pytest.approx(-0.754878, abs=1e-6)
    assert abs(c2) < 1e-12


def test_coefficients_reproduce_quadratic():
    sol = compose_solution(0.4, 6)
    c0, c1, c2 = sol.coefficients()
    for v in (0.4, 0.45, 0.6, 0.9):
        assert evaluate(sol, v) == pytest.approx(c0 + c1 * v + c2 * v * v, abs=1e-14)


def test_paper_rounding_gap():
    exact = compose_solution(0.5, 4)
    paper = compose_solution(0.5, 4, rounding="paper")
    assert abs((1 - exact.k) - 7 / 4) == pytest.approx(0.0049, abs=1e-4)
    assert paper.constant == pytest.approx((7 / 4 + paper.r) * 0.5)
    assert paper.linear == pytest.approx(-(3 / 4 + 2 * paper.r))
    assert paper.evaluate(0.5) == pytest.approx(0.5, abs=1e-15)


def test_taylor_identity():
    sol = compose_solution(0.3, 7)
    d = 1e-3
    assert sol.evaluate(0.3 + d) == pytest.approx(0.3 + sol.k * d + sol.r * d * d / 0.3, abs=1e-16)


@given(st.floats(0.05, 0.45), st.floats(3, 10), st.floats(0.0, 0.5), st.sampled_from([0.5, 2.0]))
def test_homogeneity(p, n, offset, lam):
    w = p + offset
    a = compose_solution(lam * p, n).evaluate(lam * w)
    b = compose_solution(p, n).evaluate(w)
    assert a == pytest.approx(lam * b, rel=1e-12, abs=1e-15)


@pytest.mark.parametrize("p,n", [(0.0, 4), (1.0, 4), (0.5, 2)])
def test_domain_errors(p, n):
    with pytest.raises(ValueError):
        compose_solution(p, n)
