"""Numeric validation of the quadratic approximation against the full model ODE.

    1/2 (p - z)^2 z^(n-3) z' = p (v^(n-2) - z^(n-2))/(n-2) - (v^(n-1) - z^(n-1))/(n-1)

integrated upward in v from a seed just right of the singular point (p, p).
"""

from __future__ import annotations

import io
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from typing import Protocol, Sequence

import numpy as np
from scipy.integrate import solve_ivp

from .perturbation import compose_solution

STOP_REASONS = ("window_end", "z_reached_p", "z_reached_0", "v_reached_1", "step_underflow", "failed")
CHECKPOINTS = 64
# z below this fraction of p counts as having reached the z = 0 edge
ZERO_FLOOR = 1e-2
EPS = np.finfo(float).eps


class DomainError(ValueError):
    pass


class Curve(Protocol):
    def evaluate(self, v): ...


@dataclass(frozen=True)
class ModelParams:
    p: float
    n: int

    def __post_init__(self):
        if not 0 < self.p < 1:
            raise DomainError(f"p must lie in (0, 1), got {self.p}")
        if self.n < 3 or int(self.n) != self.n:
            raise DomainError(f"n must be an integer >= 3, got {self.n}")


@dataclass(frozen=True)
class IntegrationConfig:
    delta: float = 1e-3
    window: float = 0.1
    local_tol: float = 1e-10
    max_step: float | None = None
    seed_mode: str = "approx"

    def __post_init__(self):
        if not self.delta > 0:
            raise DomainError("delta must be positive")
        if not self.window > self.delta:
            raise DomainError("window must exceed delta")
        if not 0 < self.local_tol <= 1e-4:
            raise DomainError("local_tol must lie in (0, 1e-4]")
        if self.max_step is not None and not self.max_step > 0:
            raise DomainError("max_step must be positive")
        if self.seed_mode not in ("approx", "paper"):
            raise DomainError(f"seed_mode must be 'approx' or 'paper', got {self.seed_mode!r}")

    @property
    def step_cap(self) -> float:
        return self.window / 50 if self.max_step is None else self.max_step


@dataclass(frozen=True)
class SweepRecord:
    p: float
    n: int
    delta: float
    window: float
    sup_err: float
    rms_err: float
    samples: int
    stop_reason: str


def rhs_original(v: float, z: float, params: ModelParams) -> float:
    p, n = params.p, params.n
    if z == p:
        raise ZeroDivisionError(f"singular at z = p = {p}")
    if z <= 0:
        raise DomainError(f"z must be positive, got {z}")
    num = p * (v ** (n - 2) - z ** (n - 2)) / (n - 2) - (v ** (n - 1) - z ** (n - 1)) / (n - 1)
    return 2 * num / ((p - z) ** 2 * z ** (n - 3))


@dataclass
class Trajectory:
    """Numeric solution from the seed; ``evaluate`` uses the dense interpolant."""

    params: ModelParams
    v: np.ndarray
    z: np.ndarray
    stop_reason: str
    dense: object = field(repr=False, default=None)

    @property
    def v_end(self) -> float:
        return float(self.v[-1])

    def evaluate(self, v):
        out = self.dense(np.asarray(v, dtype=float))[0]
        return float(out) if np.ndim(out) == 0 else out

    def checkpoints(self, count: int = CHECKPOINTS) -> np.ndarray:
        return np.unique(np.concatenate([self.v, np.linspace(self.v[0], self.v[-1], count)]))


def seed_point(params: ModelParams, config: IntegrationConfig, sol: Curve) -> tuple[float, float]:
    v0 = params.p + config.delta
    if config.seed_mode == "approx":
        z0 = float(sol.evaluate(v0))
    else:
        z0 = params.p - config.delta
    return v0, z0


def integrate_original(params: ModelParams, config: IntegrationConfig, sol: Curve) -> Trajectory:
    p, n = params.p, params.n
    v0, z0 = seed_point(params, config, sol)
    if not 0 < z0 < p:
        raise DomainError(f"seed z0 = {z0} outside (0, p = {p})")
    v_end = p + config.window
    clipped = v_end >= 1
    if clipped:
        v_end = 1.0
    if v0 >= v_end:
        raise DomainError("seed lies beyond the integration window")
    floor = ZERO_FLOOR * p

    def f(v, z):
        zz = z[0]
        num = p * (v ** (n - 2) - zz ** (n - 2)) / (n - 2) - (v ** (n - 1) - zz ** (n - 1)) / (n - 1)
        return [2 * num / ((p - zz) ** 2 * zz ** (n - 3))]

    def hit_p(v, z):
        return z[0] - p

    def hit_0(v, z):
        return z[0] - floor

    hit_p.terminal = True
    hit_0.terminal = True

    res = solve_ivp(
        f,
        (v0, v_end),
        [z0],
        method="DOP853",
        rtol=config.local_tol,
        atol=config.local_tol,
        max_step=config.step_cap,
        events=(hit_p, hit_0),
        dense_output=True,
    )
    if res.status == -1:
        reason = "step_underflow"
    elif res.status == 1:
        reason = "z_reached_p" if len(res.t_events[0]) else "z_reached_0"
    else:
        reason = "v_reached_1" if clipped else "window_end"
    return Trajectory(params=params, v=res.t, z=res.y[0], stop_reason=reason, dense=res.sol)


def comparison_table(traj: Trajectory, sol: Curve) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    vs = traj.checkpoints()
    z_num = traj.evaluate(vs)
    z_app = np.asarray(sol.evaluate(vs), dtype=float)
    return vs, z_num, z_app


def compare(params: ModelParams, config: IntegrationConfig, sol: Curve, seed_sol: Curve | None = None) -> SweepRecord:
    """Sup/RMS gap between the numeric trajectory and ``sol``.

    The seed is taken from ``seed_sol`` (default ``sol``).
    """
    traj = integrate_original(params, config, seed_sol if seed_sol is not None else sol)
    return _record(params, config, traj, sol)


def _record(params, config, traj, sol) -> SweepRecord:
    _, z_num, z_app = comparison_table(traj, sol)
    err = np.abs(z_num - z_app)
    return SweepRecord(
        p=params.p,
        n=params.n,
        delta=config.delta,
        window=config.window,
        sup_err=float(np.max(err)),
        rms_err=float(np.sqrt(np.mean(err ** 2))),
        samples=int(err.size),
        stop_reason=traj.stop_reason,
    )


def _cell(args) -> SweepRecord:
    p, n, config, rounding = args
    try:
        params = ModelParams(p, n)
        sol = compose_solution(p, n, rounding)
        return compare(params, config, sol)
    except (ValueError, ArithmeticError):
        return SweepRecord(p, n, config.delta, config.window, math.nan, math.nan, 0, "failed")


def sweep(
    p_values: Sequence[float],
    n_values: Sequence[int],
    config: IntegrationConfig | None = None,
    rounding: str = "exact",
    workers: int = 1,
) -> list[SweepRecord]:
    config = config or IntegrationConfig()
    for p in p_values:
        for n in n_values:
            ModelParams(p, n)
    jobs = [(p, n, config, rounding) for p in p_values for n in n_values]
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            records = list(pool.map(_cell, jobs))
    else:
        records = [_cell(j) for j in jobs]
    return sorted(records, key=lambda r: (r.p, r.n))


@dataclass(frozen=True)
class ConvergenceResult:
    order: float
    windows: tuple[float, ...]
    errors: tuple[float, ...]
    excluded: tuple[float, ...]


class ConvergenceError(RuntimeError):
    pass


def convergence_order(
    params: ModelParams,
    sol: Curve,
    base_window: float = 0.08,
    levels: int = 4,
    config: IntegrationConfig | None = None,
    seed_sol: Curve | None = None,
) -> ConvergenceResult:
    """Least-squares slope of log(sup_err) against log(window), window = base/2^j."""
    if levels < 3:
        raise ValueError("levels must be >= 3")
    config = config or IntegrationConfig(local_tol=1e-12)
    windows, errors, excluded = [], [], []
    for j in range(levels):
        w = base_window / 2 ** j
        cfg = replace(config, window=w)
        rec = compare(params, cfg, sol, seed_sol)
        if not rec.sup_err >= 100 * EPS:
            excluded.append(w)
            continue
        windows.append(w)
        errors.append(rec.sup_err)
    if len(windows) < 3:
        raise ConvergenceError(
            f"only {len(windows)} usable levels; windows {excluded} excluded (sup_err below {100 * EPS:.3g})"
        )
    slope = float(np.polyfit(np.log(windows), np.log(errors), 1)[0])
    return ConvergenceResult(slope, tuple(windows), tuple(errors), tuple(excluded))


# output formats

def _g(x: float) -> str:
    return f"{x:.17g}"


def trajectory_csv(traj: Trajectory, sol: Curve, delta: float) -> str:
    vs, z_num, z_app = comparison_table(traj, sol)
    buf = io.StringIO()
    buf.write("p,n,delta,v,z_numeric,z_approx,abs_err\n")
    for v, a, b in zip(vs, z_num, z_app):
        buf.write(
            ",".join([_g(traj.params.p), str(traj.params.n), _g(delta), _g(v), _g(a), _g(b), _g(abs(a - b))]) + "\n"
        )
    return buf.getvalue()


def sweep_csv(records: Sequence[SweepRecord]) -> str:
    buf = io.StringIO()
    buf.write("p,n,delta,window,sup_err,rms_err,samples,stop_reason\n")
    for r in records:
        buf.write(
            ",".join(
                [_g(r.p), str(r.n), _g(r.delta), _g(r.window), _g(r.sup_err), _g(r.rms_err), str(r.samples), r.stop_reason]
            )
            + "\n"
        )
    return buf.getvalue()


def write_text(path, text: str) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(text)


def sweep_svg(records: Sequence[SweepRecord], width: int = 480, panel_height: int = 220) -> str:
    """One panel per p: sup_err against n on a log10 axis."""
    ps = sorted({r.p for r in records})
    margin_l, margin_r, margin_t, margin_b = 60, 20, 30, 35
    height = panel_height * len(ps)
    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
        f'viewBox="0 0 {width} {height}" font-family="sans-serif" font-size="11">'
    ]
    for i, p in enumerate(ps):
        rows = [r for r in records if r.p == p and math.isfinite(r.sup_err)]
        top = i * panel_height
        x0, x1 = margin_l, width - margin_r
        y0, y1 = top + margin_t, top + panel_height - margin_b
        out.append(f'<text x="{width / 2:.1f}" y="{top + 18}" text-anchor="middle">p = {p:g}</text>')
        out.append(f'<rect x="{x0}" y="{y0}" width="{x1 - x0}" height="{y1 - y0}" fill="none" stroke="#888"/>')
        if not rows:
            continue
        ns = [r.n for r in rows]
        logs = [math.log10(max(r.sup_err, 1e-16)) for r in rows]
        nlo, nhi = min(ns), max(ns)
        elo, ehi = math.floor(min(logs)), math.ceil(max(logs))
        if ehi == elo:
            ehi = elo + 1
        span_n = (nhi - nlo) or 1

        def sx(nv):
            return x0 + (nv - nlo) / span_n * (x1 - x0)

        def sy(e):
            return y1 - (e - elo) / (ehi - elo) * (y1 - y0)

        for e in range(elo, ehi + 1):
            out.append(f'<text x="{x0 - 5}" y="{sy(e) + 4:.1f}" text-anchor="end">1e{e}</text>')
        for nv in sorted(set(ns)):
            out.append(f'<text x="{sx(nv):.1f}" y="{y1 + 15}" text-anchor="middle">{nv}</text>')
        pts = " ".join(f"{sx(nv):.2f},{sy(e):.2f}" for nv, e in zip(ns, logs))
        out.append(f'<polyline points="{pts}" fill="none" stroke="#1f77b4" stroke-width="1.5"/>')
        for nv, e in zip(ns, logs):
            out.append(f'<circle cx="{sx(nv):.2f}" cy="{sy(e):.2f}" r="2.5" fill="#1f77b4"/>')
        out.append(f'<text x="{width / 2:.1f}" y="{y1 + 30}" text-anchor="middle">n (sup_err, log scale)</text>')
    out.append("</svg>")
    return "\n".join(out) + "\n"
