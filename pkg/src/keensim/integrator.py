"""Fixed-step advancement of the coupled (economy, market) system.

Scheme: the deterministic 4-D economy is advanced by classical RK4 with the
lending rate frozen at its start-of-step value; (log S, mu) are advanced by
Euler-Maruyama sharing a single Gaussian shock per step; jumps are sampled
per step as Bernoulli with probability 1 - exp(-lambda*dt) using the
start-of-step (predictable) intensities, applied multiplicatively to S and
additively (in log-jump size) to mu.  Compensator terms are carried in both
drifts.  Intensities are bounded by lambda_bar * Psi_abs, and at the default
step the per-step jump probability stays below 0.0015, making the
probability of an unmodelled second jump within a step negligible.

The closed-form pathwise oracle re-evaluates S and mu from recorded noise
using the explicit exponential/convolution solutions with trapezoidal
intensity integrals; the integrator's left-endpoint drift freezing is its
only discretization error against this oracle.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from numba import njit

from .econ import _econ_derived, _econ_rhs, apriori_bounds
from .market import _drift_target, _intensities, _premium, _rate
from .params import (
    ModelParams,
    SimConfig,
    IDX_SIGMA, IDX_ETA_MU, IDX_R_L, IDX_J_UP, IDX_J_DOWN,
)
from .rng import RngStream

__all__ = [
    "JumpEvent",
    "Trajectory",
    "NoiseRecord",
    "step",
    "simulate_path",
    "simulate_status",
    "closed_form_market",
    "TRAJECTORY_COLUMNS",
]

TRAJECTORY_COLUMNS = ("t", "omega", "e", "m", "ell", "pi", "f", "r",
                      "premium", "S", "S_disc", "mu")

# Terminal status / reason codes shared with the jit kernel.
_COMPLETED, _CRISIS, _BLOWUP = 0, 1, 2
_R_NONE, _R_EMPLOYMENT, _R_DEBT, _R_BLOWUP = 0, 1, 2, 3
_REASON_NAMES = {_R_NONE: None, _R_EMPLOYMENT: "employment",
                 _R_DEBT: "debt", _R_BLOWUP: "blowup"}


@dataclass(frozen=True)
class JumpEvent:
    """One realized price jump; kind refers to the price direction."""

    t: float
    kind: str      # "down-price" (lambda^+ leg) or "up-price" (lambda^- leg)
    factor: float  # 1 - j_up or 1 + j_down


@dataclass(frozen=True)
class Trajectory:
    """Recorded samples of one path plus its jump log and terminal status."""

    samples: np.ndarray          # (n, 12) in TRAJECTORY_COLUMNS order
    jumps: tuple[JumpEvent, ...]
    status: str                  # "completed" | "crisis" | "blowup"
    reason: str | None           # "employment" | "debt" | "blowup" | None
    t_flag: float | None         # time of the crisis/blow-up flag

    def column(self, name: str) -> np.ndarray:
        return self.samples[:, TRAJECTORY_COLUMNS.index(name)]

    @property
    def times(self) -> np.ndarray:
        return self.column("t")

    def __getattr__(self, name):
        if name in TRAJECTORY_COLUMNS:
            return self.column(name)
        raise AttributeError(name)


@dataclass(frozen=True)
class NoiseRecord:
    """Per-step shocks and intensities of one simulation, for the oracle.

    ``lam_up``/``lam_down`` hold the intensities at every grid point
    (n_steps + 1 values); ``dw`` and the jump counts are per step.
    """

    dt: float
    s0: float
    mu0: float
    dw: np.ndarray
    lam_up: np.ndarray
    lam_down: np.ndarray
    n_up: np.ndarray
    n_down: np.ndarray


@njit(cache=True)
def _rk4_econ(pv, omega, e, m, ell, r, dt):
    k1 = _econ_rhs(pv, omega, e, m, ell, r)
    k2 = _econ_rhs(pv, omega + 0.5 * dt * k1[0], e + 0.5 * dt * k1[1],
                   m + 0.5 * dt * k1[2], ell + 0.5 * dt * k1[3], r)
    k3 = _econ_rhs(pv, omega + 0.5 * dt * k2[0], e + 0.5 * dt * k2[1],
                   m + 0.5 * dt * k2[2], ell + 0.5 * dt * k2[3], r)
    k4 = _econ_rhs(pv, omega + dt * k3[0], e + dt * k3[1],
                   m + dt * k3[2], ell + dt * k3[3], r)
    c = dt / 6.0
    return (omega + c * (k1[0] + 2.0 * k2[0] + 2.0 * k3[0] + k4[0]),
            e + c * (k1[1] + 2.0 * k2[1] + 2.0 * k3[1] + k4[1]),
            m + c * (k1[2] + 2.0 * k2[2] + 2.0 * k3[2] + k4[2]),
            ell + c * (k1[3] + 2.0 * k2[3] + 2.0 * k3[3] + k4[3]))


@njit(cache=True)
def _record_row(rec, i, t, pv, omega, e, m, ell, ln_s, mu):
    r = _rate(pv, mu)
    pi, kap, div, f, g, infl, phil = _econ_derived(pv, omega, e, m, ell, r)
    s = math.exp(ln_s)
    rec[i, 0] = t
    rec[i, 1] = omega
    rec[i, 2] = e
    rec[i, 3] = m
    rec[i, 4] = ell
    rec[i, 5] = pi
    rec[i, 6] = f
    rec[i, 7] = r
    rec[i, 8] = _premium(pv, mu)
    rec[i, 9] = s
    rec[i, 10] = math.exp(-pv[IDX_R_L] * t) * s
    rec[i, 11] = mu


@njit(cache=True)
def _advance(pv, omega, e, m, ell, ln_s, mu, dt, n_steps, stride,
             normals, u_up, u_dn,
             rec, jump_t, jump_kind, jump_factor,
             nr_dw, nr_lu, nr_ld, nr_nu, nr_nd, record_noise,
             e_floor, debt_ceiling, debt_blowup):
    sigma = pv[IDX_SIGMA]
    eta = pv[IDX_ETA_MU]
    tjp = math.log(1.0 - pv[IDX_J_UP])
    tjm = math.log(1.0 + pv[IDX_J_DOWN])
    sq_dt = math.sqrt(dt)

    status = _COMPLETED
    reason = _R_NONE
    t_flag = np.nan
    n_rec = 0
    n_jump = 0

    _record_row(rec, n_rec, 0.0, pv, omega, e, m, ell, ln_s, mu)
    n_rec += 1
    if e <= e_floor or (ell - m) >= debt_ceiling:
        return _CRISIS, _R_EMPLOYMENT if e <= e_floor else _R_DEBT, 0.0, n_rec, n_jump

    for k in range(n_steps):
        # Predictable (left-endpoint) evaluation of rate, flow, intensities.
        r = _rate(pv, mu)
        pi, kap, div, f, g, infl, phil = _econ_derived(pv, omega, e, m, ell, r)
        lam_up, lam_dn = _intensities(pv, f)
        a = _drift_target(pv, lam_up, lam_dn)
        if record_noise:
            nr_lu[k] = lam_up
            nr_ld[k] = lam_dn

        omega, e, m, ell = _rk4_econ(pv, omega, e, m, ell, r, dt)

        # Shared Gaussian shock for log-price and trend; compensators in both.
        dw = sq_dt * normals[k]
        comp = tjp * lam_up + tjm * lam_dn
        ln_s += (a - comp) * dt + sigma * dw
        mu += eta * (a - mu) * dt + sigma * dw - comp * dt
        if record_noise:
            nr_dw[k] = dw

        t = (k + 1) * dt
        if lam_up > 0.0 and u_up[k] < -math.expm1(-lam_up * dt):
            ln_s += tjp
            mu += tjp
            jump_t[n_jump] = t
            jump_kind[n_jump] = 0
            jump_factor[n_jump] = 1.0 - pv[IDX_J_UP]
            n_jump += 1
            if record_noise:
                nr_nu[k] = 1
        if lam_dn > 0.0 and u_dn[k] < -math.expm1(-lam_dn * dt):
            ln_s += tjm
            mu += tjm
            jump_t[n_jump] = t
            jump_kind[n_jump] = 1
            jump_factor[n_jump] = 1.0 + pv[IDX_J_DOWN]
            n_jump += 1
            if record_noise:
                nr_nd[k] = 1

        if (k + 1) % stride == 0 or k == n_steps - 1:
            finite = (math.isfinite(omega) and math.isfinite(e)
                      and math.isfinite(m) and math.isfinite(ell)
                      and math.isfinite(ln_s) and math.isfinite(mu))
            if not finite or (abs(m) + abs(ell)) > debt_blowup:
                status = _BLOWUP
                reason = _R_BLOWUP
                t_flag = t
                break
            _record_row(rec, n_rec, t, pv, omega, e, m, ell, ln_s, mu)
            n_rec += 1
            if e <= e_floor or (ell - m) >= debt_ceiling:
                status = _CRISIS
                reason = _R_EMPLOYMENT if e <= e_floor else _R_DEBT
                t_flag = t
                break

    if record_noise and status == _COMPLETED:
        r = _rate(pv, mu)
        pi, kap, div, f, g, infl, phil = _econ_derived(pv, omega, e, m, ell, r)
        lam_up, lam_dn = _intensities(pv, f)
        nr_lu[n_steps] = lam_up
        nr_ld[n_steps] = lam_dn

    return status, reason, t_flag, n_rec, n_jump


def step(s, mkt, dt: float, rng: RngStream, p: ModelParams):
    """Advance one step; returns (EconState, MarketState, [JumpEvent, ...]).

    Jump events carry t = dt (time relative to the start of the step).
    Single-step convenience built on the same kernel as simulate_path.
    """
    from .params import EconState, MarketState

    if dt <= 0:
        raise ValueError("dt must be positive")
    for name, v in (("omega", s.omega), ("e", s.e), ("m", s.m), ("ell", s.ell),
                    ("S", mkt.s), ("mu", mkt.mu)):
        if not math.isfinite(v):
            raise ValueError(f"non-finite input: {name} = {v}")
    if s.omega <= 0 or s.e <= 0 or mkt.s <= 0:
        raise ValueError("omega, e and S must be positive")

    pv = p.as_vector()
    normals = np.array([rng.draw_gaussian()])
    u_up = np.array([rng.draw_uniform()])
    u_dn = np.array([rng.draw_uniform()])
    rec = np.empty((2, 12))
    jt = np.empty(2)
    jk = np.empty(2, dtype=np.int8)
    jf = np.empty(2)
    empty = np.empty(0)
    empty_i = np.empty(0, dtype=np.int8)
    status, reason, t_flag, n_rec, n_jump = _advance(
        pv, s.omega, s.e, s.m, s.ell, math.log(mkt.s), mkt.mu, dt, 1, 1,
        normals, u_up, u_dn, rec, jt, jk, jf,
        empty, empty, empty, empty_i, empty_i, False,
        -math.inf, math.inf, math.inf)
    if status == _BLOWUP:
        raise FloatingPointError(f"blow-up within the step at t={t_flag}")
    row = rec[n_rec - 1]
    events = [JumpEvent(t=jt[i], kind="down-price" if jk[i] == 0 else "up-price",
                        factor=jf[i]) for i in range(n_jump)]
    return (EconState(row[1], row[2], row[3], row[4]),
            MarketState(row[9], row[11]),
            events)


def _draw_path_noise(cfg: SimConfig, run_index: int):
    n = cfg.n_steps
    stream = RngStream(cfg.seed, run_index)
    return stream.gaussians(n), stream.uniforms(n), stream.uniforms(n)


def _debt_blowup_cap(cfg: SimConfig, p: ModelParams) -> float:
    # Blow-up predicate: 10x the Gronwall debt cap at the horizon (often inf,
    # in which case only non-finite states flag blow-up).
    b = apriori_bounds(cfg.init_econ, cfg.t_end, p, r_cap=p.r_max)
    return 10.0 * b.debt_cap


def simulate_path(cfg: SimConfig, p: ModelParams, run_index: int,
                  e_floor: float = 0.05, debt_ceiling: float = 10.0,
                  record_noise: bool = False):
    """Simulate one path; deterministic given (cfg.seed, run_index).

    Stops early with status "crisis" when the employment-floor or
    debt-ceiling predicate fires on a recorded sample, or "blowup" on a
    non-finite state.  With ``record_noise=True`` returns
    (Trajectory, NoiseRecord) for the pathwise oracle.
    """
    n = cfg.n_steps
    if n < 1 or cfg.dt <= 0:
        raise ValueError("invalid simulation grid")
    pv = p.as_vector()
    normals, u_up, u_dn = _draw_path_noise(cfg, run_index)
    max_rec = n // cfg.record_stride + 2
    rec = np.empty((max_rec, 12))
    jt = np.empty(2 * n)
    jk = np.empty(2 * n, dtype=np.int8)
    jf = np.empty(2 * n)
    if record_noise:
        nr_dw = np.zeros(n)
        nr_lu = np.zeros(n + 1)
        nr_ld = np.zeros(n + 1)
        nr_nu = np.zeros(n, dtype=np.int8)
        nr_nd = np.zeros(n, dtype=np.int8)
    else:
        nr_dw = np.empty(0)
        nr_lu = np.empty(0)
        nr_ld = np.empty(0)
        nr_nu = np.empty(0, dtype=np.int8)
        nr_nd = np.empty(0, dtype=np.int8)

    status, reason, t_flag, n_rec, n_jump = _advance(
        pv, cfg.init_econ.omega, cfg.init_econ.e, cfg.init_econ.m,
        cfg.init_econ.ell, math.log(cfg.init_market.s), cfg.init_market.mu,
        cfg.dt, n, cfg.record_stride,
        normals, u_up, u_dn, rec, jt, jk, jf,
        nr_dw, nr_lu, nr_ld, nr_nu, nr_nd, record_noise,
        e_floor, debt_ceiling, _debt_blowup_cap(cfg, p))

    events = tuple(JumpEvent(t=float(jt[i]),
                             kind="down-price" if jk[i] == 0 else "up-price",
                             factor=float(jf[i]))
                   for i in range(n_jump))
    traj = Trajectory(
        samples=rec[:n_rec].copy(),
        jumps=events,
        status={_COMPLETED: "completed", _CRISIS: "crisis", _BLOWUP: "blowup"}[status],
        reason=_REASON_NAMES[reason],
        t_flag=None if math.isnan(t_flag) else float(t_flag),
    )
    if record_noise:
        noise = NoiseRecord(dt=cfg.dt, s0=cfg.init_market.s,
                            mu0=cfg.init_market.mu, dw=nr_dw,
                            lam_up=nr_lu, lam_down=nr_ld,
                            n_up=nr_nu, n_down=nr_nd)
        return traj, noise
    return traj


def simulate_status(cfg: SimConfig, p: ModelParams, run_index: int,
                    e_floor: float = 0.05, debt_ceiling: float = 10.0):
    """Lightweight variant for Monte Carlo: returns (status, reason, t_flag)."""
    n = cfg.n_steps
    pv = p.as_vector()
    normals, u_up, u_dn = _draw_path_noise(cfg, run_index)
    max_rec = n // cfg.record_stride + 2
    rec = np.empty((max_rec, 12))
    jt = np.empty(2 * n)
    jk = np.empty(2 * n, dtype=np.int8)
    jf = np.empty(2 * n)
    empty = np.empty(0)
    empty_i = np.empty(0, dtype=np.int8)
    status, reason, t_flag, _, _ = _advance(
        pv, cfg.init_econ.omega, cfg.init_econ.e, cfg.init_econ.m,
        cfg.init_econ.ell, math.log(cfg.init_market.s), cfg.init_market.mu,
        cfg.dt, n, cfg.record_stride,
        normals, u_up, u_dn, rec, jt, jk, jf,
        empty, empty, empty, empty_i, empty_i, False,
        e_floor, debt_ceiling, _debt_blowup_cap(cfg, p))
    status_name = {_COMPLETED: "completed", _CRISIS: "crisis", _BLOWUP: "blowup"}[status]
    return status_name, _REASON_NAMES[reason], (None if math.isnan(t_flag) else float(t_flag))


def closed_form_market(noise: NoiseRecord, p: ModelParams):
    """Pathwise oracle: explicit S and mu from recorded shocks and intensities.

    S uses the exponential solution with trapezoidal intensity integrals and
    exact jump factors; mu uses the exact exponential convolution with the
    per-step martingale increments applied at step ends.  Returns
    (times, S, mu) on the full step grid.
    """
    n = len(noise.dw)
    if (len(noise.lam_up) != n + 1 or len(noise.lam_down) != n + 1
            or len(noise.n_up) != n or len(noise.n_down) != n):
        raise ValueError("mismatched noise record path lengths")
    dt = noise.dt
    tjp = math.log(1.0 - p.j_up)
    tjm = math.log(1.0 + p.j_down)
    lam_u = noise.lam_up
    lam_d = noise.lam_down
    # Trapezoidal per-step averages of the intensities.
    lu_bar = 0.5 * (lam_u[:-1] + lam_u[1:])
    ld_bar = 0.5 * (lam_d[:-1] + lam_d[1:])

    times = dt * np.arange(n + 1)
    w = np.concatenate(([0.0], np.cumsum(noise.dw)))
    comp_int = np.concatenate(([0.0], np.cumsum((p.j_up * lu_bar - p.j_down * ld_bar) * dt)))
    n_up = np.concatenate(([0], np.cumsum(noise.n_up))).astype(np.int64)
    n_dn = np.concatenate(([0], np.cumsum(noise.n_down))).astype(np.int64)
    ln_s = (math.log(noise.s0)
            + (p.r_l - 0.5 * p.sigma**2) * times + p.sigma * w + comp_int
            + tjp * n_up + tjm * n_dn)
    s = np.exp(ln_s)

    # Trend: a_t from the intensity path, exact one-step convolution.
    a = (p.r_l - 0.5 * p.sigma**2
         + (tjp + p.j_up) * lam_u + (tjm - p.j_down) * lam_d)
    a_bar = 0.5 * (a[:-1] + a[1:])
    decay = math.exp(-p.eta_mu * dt)
    dm = (p.sigma * noise.dw
          + tjp * (noise.n_up - lu_bar * dt)
          + tjm * (noise.n_down - ld_bar * dt))
    mu = np.empty(n + 1)
    mu[0] = noise.mu0
    for k in range(n):
        mu[k + 1] = decay * mu[k] + a_bar[k] * (1.0 - decay) + dm[k]
    return times, s, mu
