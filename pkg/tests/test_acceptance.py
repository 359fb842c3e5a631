"""Exit criteria. Each test prints one PASS/FAIL line; run with ``pytest -s -m acceptance``."""

import io
import random
import time

import numpy as np
import pytest

from localpert import leading_order, perturbation, pipeline, validation
from localpert.cli import run
from localpert.series import AffineExponent, EpsSeries, ONE, binomial_expand, geometric_invert
from strategies import random_polynomial, random_series

pytestmark = pytest.mark.acceptance


def report(number, label, ok, detail=""):
    print(f"\n[acceptance {number}] {'PASS' if ok else 'FAIL'}: {label}" + (f" ({detail})" if detail else ""))
    assert ok, f"criterion {number} failed: {label} {detail}"


def test_1_symbolic_identity():
    from localpert.series import Polynomial
    from fractions import Fraction

    x, y, n = (Polynomial.var(s) for s in ("x", "y", "n"))
    t0 = time.perf_counter()
    out = io.StringIO()
    code = run(["derive"], out)
    eqs = pipeline.derive_order_equations()
    elapsed = time.perf_counter() - t0
    ok = (
        code == 0
        and "Eq (14) identity: PASS" in out.getvalue()
        and eqs.leading_numerator == y * y - x * x
        and eqs.first_numerator == ((3 - n) * (y - x) ** 2 * (2 * x + y)).scale(Fraction(1, 3))
        and elapsed < 1.0
    )
    report(1, "derive reproduces the order-0/order-1 equations exactly", ok, f"{elapsed:.3f}s")


def test_2_leading_root():
    t0 = time.perf_counter()
    roots = leading_order.solve_leading_cubic.__wrapped__()
    elapsed = time.perf_counter() - t0
    resid = abs(roots.k ** 3 - roots.k ** 2 + 1)
    ok = abs(roots.k - (-0.7549)) < 5e-5 and abs(roots.k + 0.754878) < 1e-6 and resid < 1e-12 and elapsed < 0.1
    report(2, "k = -0.754878 within 5e-5 of -0.7549, |q(k)| < 1e-12", ok, f"k={roots.k:.9f}, |q|={resid:.1e}")


def test_3_correction_constants():
    cc = perturbation.correction_coefficients(4)
    intercept, slope = perturbation.fit_r_line(range(3, 9))
    r3 = perturbation.correction_coefficient_r(3)
    checks = [
        abs(cc.A_const - (-8.684)) < 1e-3,
        abs(cc.A_n - 2.895) < 1e-3,
        abs(cc.prefactor - 0.775) < 1e-3,
        abs(intercept - 1.012) < 5e-4,
        abs(slope - (-0.3373)) < 5e-4,
        abs(r3) < 1e-12,
    ]
    detail = (
        f"A={cc.A_const:.4f}+{cc.A_n:.4f}n, |1/(3k^3)|={cc.prefactor:.4f}, "
        f"r={intercept:.5f}{slope:+.5f}n, r(3)={r3:.1e}"
    )
    report(3, "correction constants match the printed values", all(checks), detail)


def test_4_particular_solution():
    t0 = time.perf_counter()
    devs = {n: perturbation.verify_particular(n, 1e-4, 0.1) for n in (4, 6, 8)}
    elapsed = time.perf_counter() - t0
    ok = all(d < 1e-6 for d in devs.values()) and elapsed < 1.0
    detail = ", ".join(f"n={n}: {d:.1e}" for n, d in devs.items()) + f"; {elapsed:.2f}s"
    report(4, "integrated correction within 1e-6 of r x^2 on [1e-4, 0.1]", ok, detail)


def test_5_first_integral():
    fi = leading_order.first_integral()
    worst = 0.0
    for Y0 in (-0.02, -0.005, 0.05, 0.2):
        samples = leading_order.integrate_leading(0.01, Y0, 0.1, tol=1e-10)
        worst = max(worst, leading_order.drift(samples, fi))
    residue = abs(fi.residue_sum - 1)
    ok = worst < 1e-6 and residue < 1e-12
    report(5, "Phi drift < 1e-6, residue sum = 1 within 1e-12", ok, f"drift={worst:.1e}, residue err={residue:.1e}")


def test_6_figure_sweep():
    t0 = time.perf_counter()
    recs = validation.sweep([0.3, 0.5, 0.7], list(range(3, 9)), validation.IntegrationConfig())
    elapsed = time.perf_counter() - t0
    ok = len(recs) == 18 and elapsed < 10
    rows = []
    for p in (0.3, 0.5, 0.7):
        errs = [r.sup_err for r in recs if r.p == p]
        mono = all(np.isfinite(errs)) and all(a <= b for a, b in zip(errs, errs[1:]))
        ok &= mono
        rows.append(f"p={p}: {'ok' if mono else 'NOT monotone'}")
    report(6, "default sweep: sup_err nondecreasing in n for every p", ok, "; ".join(rows) + f"; {elapsed:.2f}s")


def test_7_convergence_order():
    t0 = time.perf_counter()
    params = validation.ModelParams(0.5, 4)
    sol = perturbation.compose_solution(0.5, 4)
    full = validation.convergence_order(params, sol, 0.08, 4)
    degraded = validation.convergence_order(params, sol.leading_only(), 0.08, 4)
    elapsed = time.perf_counter() - t0
    ok = full.order >= 2.5 and degraded.order < 2.3 and elapsed < 10
    report(7, "order >= 2.5 with correction, < 2.3 without", ok,
           f"full={full.order:.3f}, r=0: {degraded.order:.3f}; {elapsed:.2f}s")


CASES = 1000


def _ring(rng):
    order = rng.randint(0, 4)
    a, b, c = (random_series(rng, order) for _ in range(3))
    return (
        (a + b) + c == a + (b + c)
        and (a * b) * c == a * (b * c)
        and a + b == b + a
        and a * b == b * a
        and a * (b + c) == a * b + a * c
    )


def _convolution(rng):
    order = rng.randint(0, 4)
    a, b = random_series(rng, order), random_series(rng, order)
    prod = a * b
    zero = ONE - ONE
    return all(
        prod.coeffs[j] == sum((a.coeffs[i] * b.coeffs[j - i] for i in range(j + 1)), zero)
        for j in range(order + 1)
    )


def _inversion(rng):
    order = rng.randint(0, 4)
    s = random_series(rng, order)
    unit = EpsSeries([ONE] + list(s.coeffs[1:]), order)
    return unit * geometric_invert(unit) == EpsSeries([1], order)


def _integer_exponent(rng):
    order, m = rng.randint(0, 4), rng.randint(0, 5)
    u = random_polynomial(rng)
    power = EpsSeries([1], order)
    for _ in range(m):
        power = power * EpsSeries([1, u], order)
    return binomial_expand(AffineExponent(0, m), u, order) == power


def test_8_series_properties():
    t0 = time.perf_counter()
    failures = {}
    for prop in (_ring, _convolution, _inversion, _integer_exponent):
        rng = random.Random(f"{prop.__name__}-2024")
        bad = sum(not prop(rng) for _ in range(CASES))
        failures[prop.__name__.lstrip("_")] = bad
    elapsed = time.perf_counter() - t0
    ok = not any(failures.values()) and elapsed < 30
    detail = ", ".join(f"{k}: {v} failed" for k, v in failures.items()) + f"; {elapsed:.1f}s"
    report(8, f"series property suite, {CASES} random cases per property", ok, detail)


def test_9_determinism(tmp_path):
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    codes = [run(["sweep", "--csv", str(path), "--quiet"], io.StringIO()) for path in (a, b)]
    ok = codes == [0, 0] and a.read_bytes() == b.read_bytes() and len(a.read_bytes()) > 0
    report(9, "repeated sweep runs give byte-identical CSV", ok)
