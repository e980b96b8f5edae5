"""Asset-price jump/drift structure, trend-indicator target, rate and premium maps.

Naming warning: the "up"/"down" in ``lambda_up``/``lam_up`` refers to the
superscript of the intensity (lambda^+ / lambda^-), NOT the direction of the
price move.  lambda^+ (``lam_up``) is the intensity of *downward* price jumps
of relative size ``j_up``; lambda^- (``lam_down``) drives *upward* jumps of
relative size ``j_down``.  Speculative inflows (f > 0) feed crash risk,
outflows (f < 0) feed rebound jumps.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from numba import njit

from .params import (
    ModelParams,
    IDX_R_L, IDX_SIGMA, IDX_J_UP, IDX_J_DOWN, IDX_LAMBDA_UP, IDX_LAMBDA_DOWN,
    IDX_R_MAX, IDX_RHO_1, IDX_RHO_2,
)

__all__ = [
    "JumpIntensities",
    "jump_intensities",
    "trend_drift_target",
    "lending_rate",
    "premium",
    "log_price_increment_drift",
]


@dataclass(frozen=True)
class JumpIntensities:
    """Instantaneous jump intensities; at most one of the two is positive."""

    lam_up: float    # lambda^+ : downward price jumps
    lam_down: float  # lambda^- : upward price jumps


@njit(cache=True)
def _intensities(pv, f):
    lam_up = pv[IDX_LAMBDA_UP] * (f if f > 0.0 else 0.0)
    lam_down = pv[IDX_LAMBDA_DOWN] * (-f if f < 0.0 else 0.0)
    return lam_up, lam_down


@njit(cache=True)
def _drift_target(pv, lam_up, lam_down):
    return (pv[IDX_R_L] - 0.5 * pv[IDX_SIGMA] ** 2
            + (math.log(1.0 - pv[IDX_J_UP]) + pv[IDX_J_UP]) * lam_up
            + (math.log(1.0 + pv[IDX_J_DOWN]) - pv[IDX_J_DOWN]) * lam_down)


@njit(cache=True)
def _rate(pv, mu):
    r = pv[IDX_R_L] + pv[IDX_RHO_1] * math.exp(-pv[IDX_RHO_2] * (mu - pv[IDX_R_L]))
    return min(pv[IDX_R_MAX], r)


@njit(cache=True)
def _premium(pv, mu):
    if pv[IDX_RHO_1] == 0.0:
        return 0.0
    return pv[IDX_RHO_1] * math.exp(-pv[IDX_RHO_2] * (mu - pv[IDX_R_L]))


def jump_intensities(f: float, p: ModelParams) -> JumpIntensities:
    """Intensities driven by the positive/negative parts of the flow f."""
    lam_up, lam_down = _intensities(p.as_vector(), f)
    return JumpIntensities(lam_up, lam_down)


def trend_drift_target(lams: JumpIntensities, p: ModelParams) -> float:
    """Predictable log-return drift the trend indicator reverts toward.

    Both jump corrections are nonpositive (log(1-x)+x <= 0 and
    log(1+x)-x <= 0), so the target never exceeds r_l - sigma^2/2.
    """
    return _drift_target(p.as_vector(), lams.lam_up, lams.lam_down)


def log_price_increment_drift(lams: JumpIntensities, p: ModelParams) -> float:
    """Compensated log-price drift; coincides with the trend target."""
    return trend_drift_target(lams, p)


def lending_rate(mu: float, p: ModelParams) -> float:
    """Effective rate: baseline plus a premium decaying in the trend, capped."""
    return _rate(p.as_vector(), mu)


def premium(mu: float, p: ModelParams) -> float:
    """Lending spread rho_1 * exp(-rho_2*(mu - r_l)); exactly 0 when rho_1 = 0."""
    return _premium(p.as_vector(), mu)
