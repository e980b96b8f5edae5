"""Crisis-probability estimation over points, 1-D sweeps, and 2-D grids.

A crisis is an employment collapse (e <= 0.05) or a net debt blow-out
(ell - m >= 10) within the horizon; numerical blow-up counts as a crisis by
default.  Estimates carry Wilson 95% intervals, which stay valid at
probabilities near 0 or 1 where many grid points sit.

Runs are keyed by run_index and reduced in index order, so results are
identical for any worker count.
"""

from __future__ import annotations

import dataclasses
import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import params as _params
from .integrator import Trajectory, simulate_status
from .params import ModelParams, SimConfig, validate

__all__ = [
    "CrisisCriterion",
    "CrisisHit",
    "McResult",
    "detect_crisis",
    "estimate",
    "sweep_1d",
    "sweep_2d",
    "wilson_interval",
    "worker_count",
]

_Z95 = 1.959963984540054


@dataclass(frozen=True)
class CrisisCriterion:
    e_floor: float = 0.05
    debt_ceiling: float = 10.0
    horizon: float = 150.0
    count_blowup_as_crisis: bool = True


@dataclass(frozen=True)
class CrisisHit:
    reason: str  # "employment" | "debt" | "blowup"
    t: float


@dataclass(frozen=True)
class McResult:
    """Crisis-probability estimate at one parameter point."""

    point: dict
    n_runs: int
    n_crisis: int
    p_hat: float
    ci_low: float
    ci_high: float
    n_blowup: int
    mean_crisis_time: float  # nan when no crisis run
    error: str | None = None


def wilson_interval(k: int, n: int, z: float = _Z95) -> tuple[float, float]:
    """Wilson score interval for k successes out of n."""
    if n <= 0:
        raise ValueError("n must be positive")
    p_hat = k / n
    denom = 1.0 + z * z / n
    center = (p_hat + z * z / (2 * n)) / denom
    half = z * math.sqrt(p_hat * (1 - p_hat) / n + z * z / (4 * n * n)) / denom
    # The boundary cases are exactly 0/1 analytically; avoid rounding dust.
    lo = 0.0 if k == 0 else max(0.0, center - half)
    hi = 1.0 if k == n else min(1.0, center + half)
    return lo, hi


def detect_crisis(traj: Trajectory, c: CrisisCriterion) -> CrisisHit | None:
    """First sample where a crisis condition holds within the horizon."""
    t = traj.times
    within = t <= c.horizon
    e_hit = within & (traj.e <= c.e_floor)
    d_hit = within & ((traj.ell - traj.m) >= c.debt_ceiling)
    idx_e = int(np.argmax(e_hit)) if e_hit.any() else None
    idx_d = int(np.argmax(d_hit)) if d_hit.any() else None
    hits = []
    if idx_e is not None:
        hits.append((t[idx_e], "employment"))
    if idx_d is not None:
        hits.append((t[idx_d], "debt"))
    if traj.status == "blowup" and c.count_blowup_as_crisis and traj.t_flag <= c.horizon:
        hits.append((traj.t_flag, "blowup"))
    if not hits:
        return None
    t_hit, reason = min(hits)
    return CrisisHit(reason=reason, t=float(t_hit))


def worker_count() -> int:
    """Worker processes for Monte Carlo runs (KEENSIM_WORKERS, default: CPUs)."""
    env = os.environ.get("KEENSIM_WORKERS")
    if env:
        return max(1, int(env))
    return os.cpu_count() or 1


def _run_block(args):
    p, cfg, c, indices = args
    out = []
    for i in indices:
        status, reason, t_flag = simulate_status(
            cfg, p, i, e_floor=c.e_floor, debt_ceiling=c.debt_ceiling)
        out.append((i, status, t_flag if t_flag is not None else math.nan))
    return out


def _run_point(p: ModelParams, cfg: SimConfig, c: CrisisCriterion,
               n_runs: int, workers: int | None):
    w = workers if workers is not None else worker_count()
    indices = list(range(n_runs))
    if w <= 1 or n_runs == 1:
        blocks = [_run_block((p, cfg, c, indices))]
    else:
        chunks = [indices[i::w] for i in range(w)]
        with ProcessPoolExecutor(max_workers=w) as pool:
            blocks = list(pool.map(_run_block, [(p, cfg, c, ch) for ch in chunks if ch]))
    status = [""] * n_runs
    t_flag = np.full(n_runs, math.nan)
    for block in blocks:
        for i, st, tf in block:
            status[i] = st
            t_flag[i] = tf
    return status, t_flag


def estimate(point: ModelParams, cfg: SimConfig, c: CrisisCriterion,
             n_runs: int, workers: int | None = None,
             point_label: dict | None = None) -> McResult:
    """Estimate the crisis probability at one parameter point.

    Runs run_index = 0..n_runs-1 and reduces by index, so the result does
    not depend on worker scheduling.
    """
    if n_runs < 1:
        raise ValueError("n_runs must be >= 1")
    status, t_flag = _run_point(point, cfg, c, n_runs, workers)
    crisis_times = []
    n_blowup = 0
    for st, tf in zip(status, t_flag):
        is_crisis = (st == "crisis" and tf <= c.horizon)
        if st == "blowup":
            n_blowup += 1
            is_crisis = c.count_blowup_as_crisis and tf <= c.horizon
        if is_crisis:
            crisis_times.append(tf)
    n_crisis = len(crisis_times)
    lo, hi = wilson_interval(n_crisis, n_runs)
    return McResult(
        point=point_label or {},
        n_runs=n_runs,
        n_crisis=n_crisis,
        p_hat=n_crisis / n_runs,
        ci_low=lo,
        ci_high=hi,
        n_blowup=n_blowup,
        mean_crisis_time=float(np.mean(crisis_times)) if crisis_times else math.nan,
    )


def _error_result(label: dict, n_runs: int, message: str) -> McResult:
    return McResult(point=label, n_runs=0, n_crisis=0, p_hat=math.nan,
                    ci_low=math.nan, ci_high=math.nan, n_blowup=0,
                    mean_crisis_time=math.nan, error=message)


def sweep_1d(param_name: str, values, base: ModelParams, cfg: SimConfig,
             c: CrisisCriterion, n_runs: int = 500,
             workers: int | None = None) -> list[McResult]:
    """One McResult per value, all other parameters at base, in input order.

    Invalid points are reported inline (error field set) and the sweep
    continues, so long sweeps stay resumable by inspection.
    """
    results = []
    for v in values:
        label = {param_name: float(v)}
        if param_name not in _params._PARAM_NAMES:
            results.append(_error_result(label, n_runs, f"unknown parameter {param_name!r}"))
            continue
        p = dataclasses.replace(base, **{param_name: float(v)})
        violations = validate(p)
        if violations:
            results.append(_error_result(label, n_runs, "; ".join(map(str, violations))))
            continue
        results.append(estimate(p, cfg, c, n_runs, workers, point_label=label))
    return results


def sweep_2d(p1_name: str, p1_values, p2_name: str, p2_values,
             base: ModelParams, cfg: SimConfig, c: CrisisCriterion,
             n_runs: int = 300, workers: int | None = None) -> list[list[McResult]]:
    """Row-major grid of estimates: rows iterate p1, columns iterate p2."""
    grid = []
    for v1 in p1_values:
        row = []
        for v2 in p2_values:
            label = {p1_name: float(v1), p2_name: float(v2)}
            if p1_name not in _params._PARAM_NAMES or p2_name not in _params._PARAM_NAMES:
                row.append(_error_result(label, n_runs, "unknown parameter"))
                continue
            p = dataclasses.replace(base, **{p1_name: float(v1), p2_name: float(v2)})
            violations = validate(p)
            if violations:
                row.append(_error_result(label, n_runs, "; ".join(map(str, violations))))
                continue
            row.append(estimate(p, cfg, c, n_runs, workers, point_label=label))
        grid.append(row)
    return grid
