"""Closed-form stationary and limiting quantities, plus simulation cross-checks.

The formulas here serve as oracles for the test suite and back the CLI
``validate`` command.  The constant-intensity trend harness simulates the
jump-OU trend indicator alone, with the speculative flow forced to a
constant, using the same per-step scheme as the full integrator.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from numba import njit

from .market import _drift_target, _intensities
from .params import ModelParams, IDX_SIGMA, IDX_ETA_MU
from .rng import RngStream

__all__ = [
    "StationaryMoments",
    "ou_moments",
    "jump_ou_moments",
    "premium_lognormal_mean",
    "deterministic_limits",
    "simulate_trend",
    "batch_standard_errors",
    "MomentCheck",
    "moment_checks",
]


@dataclass(frozen=True)
class StationaryMoments:
    mean: float
    variance: float
    skewness: float
    kurtosis: float


def ou_moments(p: ModelParams) -> StationaryMoments:
    """Stationary Gaussian moments of the trend indicator without jumps."""
    if p.eta_mu <= 0:
        raise ValueError("eta_mu must be positive")
    return StationaryMoments(
        mean=p.r_l - 0.5 * p.sigma**2,
        variance=p.sigma**2 / (2.0 * p.eta_mu),
        skewness=0.0,
        kurtosis=3.0,
    )


def jump_ou_moments(direction: str, f_const: float, p: ModelParams) -> StationaryMoments:
    """Stationary moments of the trend under constant-intensity jumps.

    direction "down-price": flow f_const > 0, jumps of log size
    log(1 - j_up) at intensity lambda_up * f_const (negative skew: the
    trend creeps up between jumps and drops at them, giving a left tail).
    direction "up-price": flow -f_const, jumps of log size log(1 + j_down)
    at intensity lambda_down * f_const (positive skew).

    Derivation: for d(mu) = eta*(m - mu) dt + sigma dW + Jt (dN - lam dt)
    the stationary cumulants are c_n = lam * Jt^n / (n * eta) for n >= 3
    and c_2 = (sigma^2 + lam * Jt^2) / (2 * eta), read off the stationary
    characteristic function of the jump-OU process.
    """
    if f_const <= 0:
        raise ValueError("f_const must be positive")
    if p.eta_mu <= 0:
        raise ValueError("eta_mu must be positive")
    if direction == "down-price":
        j_tilde = math.log(1.0 - p.j_up)
        bracket = j_tilde + p.j_up
        lam_f = p.lambda_up * f_const
    elif direction == "up-price":
        j_tilde = math.log(1.0 + p.j_down)
        bracket = j_tilde - p.j_down
        lam_f = p.lambda_down * f_const
    else:
        raise ValueError(f"unknown direction {direction!r}")
    s2 = p.sigma**2
    denom = s2 + lam_f * j_tilde**2
    return StationaryMoments(
        mean=p.r_l - 0.5 * s2 + bracket * lam_f,
        variance=denom / (2.0 * p.eta_mu),
        skewness=(2.0**1.5 * math.sqrt(p.eta_mu) * lam_f * j_tilde**3
                  / (3.0 * denom**1.5)),
        kurtosis=3.0 + p.eta_mu * lam_f * j_tilde**4 / denom**2,
    )


def premium_lognormal_mean(p: ModelParams) -> float:
    """Asymptotic mean of the lending premium in the no-jump case."""
    if p.eta_mu <= 0:
        raise ValueError("eta_mu must be positive")
    return p.rho_1 * math.exp(p.rho_2 * p.sigma**2 / 2.0
                              + p.rho_2**2 * p.sigma**2 / (4.0 * p.eta_mu))


def deterministic_limits(p: ModelParams) -> tuple[float, float]:
    """(long-run trend, long-run effective rate) with all noise off."""
    return p.r_l, min(p.r_max, p.r_l + p.rho_1)


@njit(cache=True)
def _trend_kernel(mu0, a, eta, sigma, lam_up, lam_dn, tjp, tjm, dt,
                  normals, u_up, u_dn, out):
    comp = tjp * lam_up + tjm * lam_dn
    sq_dt = math.sqrt(dt)
    mu = mu0
    p_up = -math.expm1(-lam_up * dt)
    p_dn = -math.expm1(-lam_dn * dt)
    for k in range(normals.shape[0]):
        mu += eta * (a - mu) * dt + sigma * sq_dt * normals[k] - comp * dt
        if lam_up > 0.0 and u_up[k] < p_up:
            mu += tjp
        if lam_dn > 0.0 and u_dn[k] < p_dn:
            mu += tjm
        out[k] = mu


def simulate_trend(p: ModelParams, f_const: float, t_end: float, dt: float,
                   seed: int, n_paths: int = 1, burn_in: float = 0.0,
                   mu0: float | None = None) -> np.ndarray:
    """Simulate the trend indicator with the flow forced to ``f_const``.

    Returns an (n_paths, n_kept) array of per-step samples after the
    burn-in.  The sign of f_const selects the jump leg exactly as in the
    full model; f_const = 0 (or zero intensity scales) gives the pure OU.
    """
    pv = p.as_vector()
    lam_up, lam_dn = _intensities(pv, f_const)
    a = _drift_target(pv, lam_up, lam_dn)
    n = int(round(t_end / dt))
    skip = int(round(burn_in / dt))
    if not 0 <= skip < n:
        raise ValueError("burn_in must lie within the horizon")
    if mu0 is None:
        mu0 = p.r_l
    tjp = math.log(1.0 - p.j_up)
    tjm = math.log(1.0 + p.j_down)
    out = np.empty((n_paths, n - skip))
    buf = np.empty(n)
    for i in range(n_paths):
        stream = RngStream(seed, i)
        normals = stream.gaussians(n)
        u_up = stream.uniforms(n)
        u_dn = stream.uniforms(n)
        _trend_kernel(mu0, a, pv[IDX_ETA_MU], pv[IDX_SIGMA], lam_up, lam_dn,
                      tjp, tjm, dt, normals, u_up, u_dn, buf)
        out[i] = buf[skip:]
    return out


def batch_standard_errors(x: np.ndarray, n_batches: int = 50):
    """Batch-means estimates: ((mean, var, skew, kurt), their standard errors).

    Splits the pooled samples into contiguous batches, computes each moment
    per batch, and reports the across-batch means and standard errors.
    """
    flat = np.asarray(x).ravel()
    usable = (len(flat) // n_batches) * n_batches
    batches = flat[:usable].reshape(n_batches, -1)
    means = batches.mean(axis=1)
    variances = batches.var(axis=1)
    centered = batches - batches.mean(axis=1, keepdims=True)
    stds = np.sqrt(variances)
    skews = (centered**3).mean(axis=1) / stds**3
    kurts = (centered**4).mean(axis=1) / stds**4
    stats = np.array([means, variances, skews, kurts])
    return stats.mean(axis=1), stats.std(axis=1, ddof=1) / math.sqrt(n_batches)


@dataclass(frozen=True)
class MomentCheck:
    """One analytic-vs-simulated comparison row for the validate table."""

    quantity: str
    formula: float
    simulated: float
    std_error: float
    passed: bool


def moment_checks(p: ModelParams, seed: int = 0, n_paths: int = 200,
                  horizon: float = 200.0, dt: float = 0.01,
                  long_horizon: float = 5.0e4,
                  tol_se: float = 4.0) -> list[MomentCheck]:
    """Run the full analytic-vs-simulated comparison used by CLI validate.

    Gaussian-case mean/variance and premium mean come from an ensemble of
    no-jump trend paths; the jump cases use one long constant-intensity
    path each, with 50-batch standard errors and a tolerance of
    ``tol_se`` standard errors.
    """
    import dataclasses as _dc

    checks: list[MomentCheck] = []

    def add(name, formula, simulated, se):
        checks.append(MomentCheck(name, formula, simulated, se,
                                  abs(simulated - formula) <= tol_se * se))

    # No-jump case: force zero intensity scales so f is irrelevant.
    p_nojump = _dc.replace(p, lambda_up=0.0, lambda_down=0.0)
    ou = ou_moments(p_nojump)
    mu = simulate_trend(p_nojump, 0.0, horizon, dt, seed,
                        n_paths=n_paths, burn_in=min(20.0, horizon / 4))
    (m_hat, v_hat, _, _), (se_m, se_v, _, _) = batch_standard_errors(mu)
    add("ou_mean", ou.mean, m_hat, se_m)
    add("ou_variance", ou.variance, v_hat, se_v)

    prem = np.mean(p.rho_1 * np.exp(-p.rho_2 * (mu - p.r_l)), axis=1)
    add("premium_mean", premium_lognormal_mean(p),
        float(prem.mean()), float(prem.std(ddof=1) / math.sqrt(len(prem))))

    for name, direction, f_const in (("jump_ou_down", "down-price", 0.0566),
                                     ("jump_ou_up", "up-price", 0.15)):
        ref = jump_ou_moments(direction, f_const, p)
        f_signed = f_const if direction == "down-price" else -f_const
        path = simulate_trend(p, f_signed, long_horizon, dt, seed + 1,
                              burn_in=min(100.0, long_horizon / 10))
        (m_hat, v_hat, s_hat, k_hat), ses = batch_standard_errors(path)
        add(name + "_mean", ref.mean, m_hat, ses[0])
        add(name + "_variance", ref.variance, v_hat, ses[1])
        add(name + "_skewness", ref.skewness, s_hat, ses[2])
        add(name + "_kurtosis", ref.kurtosis, k_hat, ses[3])
    return checks
