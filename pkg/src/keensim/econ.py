"""Real-economy behavioral functions, the 4-D vector field, and a-priori bounds.

State is (omega, e, m, ell): wage share, employment rate, firm deposit ratio,
loan ratio.  The lending rate ``r`` enters as an instantaneous input value;
how it is coupled over a time step belongs to the integrator.

The jit helpers (``_econ_rhs``, ``_econ_derived``) are shared with the
integrator kernel so the simulated field and the public API are a single
implementation.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from numba import njit

from .params import (
    EconState,
    ModelParams,
    IDX_NU, IDX_DELTA, IDX_R_M, IDX_KAPPA_MIN, IDX_KAPPA_MAX, IDX_KAPPA_0,
    IDX_KAPPA_1, IDX_DELTA_MIN, IDX_DELTA_MAX, IDX_DELTA_0, IDX_DELTA_1,
    IDX_ZETA, IDX_KAPPA_L, IDX_PSI_MIN, IDX_PSI_MAX, IDX_PSI_0, IDX_PSI_1,
    IDX_ALPHA, IDX_BETA, IDX_GAMMA, IDX_ETA_P, IDX_XI, IDX_PHI_0, IDX_PHI_1,
)

__all__ = [
    "EconDerived",
    "AprioriBounds",
    "clamped_affine",
    "profit_ratio",
    "inflation",
    "growth_rate",
    "econ_vector_field",
    "apriori_bounds",
]


@dataclass(frozen=True)
class EconDerived:
    """Quantities derived from one (state, rate) evaluation."""

    pi: float        # profit ratio before dividends
    kappa: float     # investment share of output
    divid: float     # dividend share of output
    f: float         # normalized speculative flow
    g: float         # real output growth rate, 1/years
    infl: float      # inflation rate, 1/years
    phillips: float  # wage-bargaining term, 1/years


def clamped_affine(x: float, lo: float, hi: float, c0: float, c1: float) -> float:
    """min(hi, max(lo, c0 + c1*x)); the shared form of kappa, Delta and Psi."""
    if lo > hi:
        raise ValueError(f"clamp bounds out of order: lo={lo} > hi={hi}")
    return min(hi, max(lo, c0 + c1 * x))


def profit_ratio(s: EconState, r: float, p: ModelParams) -> float:
    """pi = 1 - omega - delta*nu + r_m*m - r*ell."""
    return 1.0 - s.omega - p.delta * p.nu + p.r_m * s.m - r * s.ell


def inflation(omega: float, p: ModelParams) -> float:
    """Lagged price adjustment toward the markup target: eta_p*(xi*omega - 1)."""
    return p.eta_p * (p.xi * omega - 1.0)


def growth_rate(kappa: float, p: ModelParams) -> float:
    """Real output growth implied by the investment share: kappa/nu - delta."""
    return kappa / p.nu - p.delta


@njit(cache=True)
def _clamp(x, lo, hi, c0, c1):
    v = c0 + c1 * x
    if v < lo:
        return lo
    if v > hi:
        return hi
    return v


@njit(cache=True)
def _econ_derived(pv, omega, e, m, ell, r):
    """Returns (pi, kappa, divid, f, g, infl, phillips) at one state."""
    pi = 1.0 - omega - pv[IDX_DELTA] * pv[IDX_NU] + pv[IDX_R_M] * m - r * ell
    kap = _clamp(pi, pv[IDX_KAPPA_MIN], pv[IDX_KAPPA_MAX], pv[IDX_KAPPA_0], pv[IDX_KAPPA_1])
    div = _clamp(pi, pv[IDX_DELTA_MIN], pv[IDX_DELTA_MAX], pv[IDX_DELTA_0], pv[IDX_DELTA_1])
    g = kap / pv[IDX_NU] - pv[IDX_DELTA]
    infl = pv[IDX_ETA_P] * (pv[IDX_XI] * omega - 1.0)
    f = _clamp(g + infl, pv[IDX_PSI_MIN], pv[IDX_PSI_MAX], pv[IDX_PSI_0], pv[IDX_PSI_1])
    phil = pv[IDX_PHI_0] + pv[IDX_PHI_1] * e
    return pi, kap, div, f, g, infl, phil


@njit(cache=True)
def _econ_rhs(pv, omega, e, m, ell, r):
    """Right-hand sides of the 4-D system at one state with rate r."""
    pi, kap, div, f, g, infl, phil = _econ_derived(pv, omega, e, m, ell, r)
    gi = g + infl
    d_omega = omega * (phil - pv[IDX_ALPHA] - (1.0 - pv[IDX_GAMMA]) * infl)
    d_e = e * (g - pv[IDX_ALPHA] - pv[IDX_BETA])
    rk = (r - pv[IDX_KAPPA_L]) * ell
    d_m = pi - (1.0 - pv[IDX_ZETA]) * pv[IDX_NU] * g + rk - div + f - gi * m
    d_ell = pv[IDX_ZETA] * (kap - pv[IDX_DELTA] * pv[IDX_NU]) + rk + f - gi * ell
    return d_omega, d_e, d_m, d_ell


def econ_vector_field(s: EconState, r: float, p: ModelParams) -> tuple[EconState, EconDerived]:
    """Evaluate the vector field and all derived quantities at one state.

    Returns (d/dt of the state packed as an :class:`EconState`, derived).
    Raises ``ValueError`` on any non-finite input, naming the component:
    the Monte Carlo engine classifies blow-up explicitly and must see a
    clean signal instead of propagating NaN.
    """
    for name, v in (("omega", s.omega), ("e", s.e), ("m", s.m),
                    ("ell", s.ell), ("r", r)):
        if not math.isfinite(v):
            raise ValueError(f"non-finite input: {name} = {v}")
    pv = p.as_vector()
    d = _econ_rhs(pv, s.omega, s.e, s.m, s.ell, r)
    der = EconDerived(*_econ_derived(pv, s.omega, s.e, s.m, s.ell, r))
    return EconState(*d), der


@dataclass(frozen=True)
class AprioriBounds:
    """Gronwall-type caps valid for any rate path with 0 <= r_t <= r_cap.

    The debt cap grows like exp(B_T * T) and overflows float64 already for
    moderate horizons at base parameters; overflowing caps are reported as
    ``inf`` (the comparisons they feed remain valid).
    """

    horizon: float
    g_max: float
    e_cap: float
    phi_cap: float
    omega_cap: float
    infl_cap: float
    h_cap: float
    a_m: float
    b_m: float
    a_l: float
    b_l: float
    a_total: float
    b_total: float
    debt_cap: float


def _exp(x: float) -> float:
    try:
        return math.exp(x)
    except OverflowError:
        return math.inf


def apriori_bounds(x0: EconState, T: float, p: ModelParams, r_cap: float) -> AprioriBounds:
    """Explicit bound constants for the horizon ``T``.

    ``kappa_abs``-style constants are max(|lo|, |hi|) of the respective
    clamped functions; the debt cap combines the |m| + |ell| growth
    inequality with the stated modification when B_T = 0.
    """
    if r_cap < 0:
        raise ValueError("r_cap must be nonnegative")
    if x0.omega <= 0 or x0.e <= 0:
        raise ValueError("omega0 and e0 must be positive")
    kappa_abs = max(abs(p.kappa_min), abs(p.kappa_max))
    delta_abs = max(abs(p.delta_min), abs(p.delta_max))
    psi_abs = max(abs(p.psi_min), abs(p.psi_max))

    g_max = kappa_abs / p.nu - p.delta
    g_abs = abs(g_max)
    e_cap = x0.e * _exp((g_max - p.alpha - p.beta) * T)
    phi_cap = abs(p.phi_0) + abs(p.phi_1) * e_cap
    omega_cap = x0.omega * _exp((phi_cap - p.alpha + (1.0 - p.gamma) * p.eta_p) * T)
    infl_cap = p.eta_p * (p.xi * omega_cap + 1.0)
    h_cap = g_abs + infl_cap
    r_kl = r_cap + abs(p.kappa_l)

    a_m = (abs(1.0 - p.delta * p.nu) + omega_cap
           + (1.0 - p.zeta) * (kappa_abs + p.delta * p.nu)
           + delta_abs + psi_abs)
    b_m = max(p.r_m + h_cap, r_cap + r_kl)
    a_l = p.zeta * (kappa_abs + p.delta * p.nu) + psi_abs
    b_l = r_kl + h_cap
    a_total = a_m + a_l
    b_total = b_m + b_l

    u0 = abs(x0.m) + abs(x0.ell)
    if b_total == 0.0:
        debt_cap = u0 + a_total * T
    else:
        ebt = _exp(b_total * T)
        debt_cap = u0 * ebt + (a_total / b_total) * (ebt - 1.0)
        if math.isnan(debt_cap):
            # inf/inf from overflowing A/B constants: the true cap is beyond
            # float64 range, so report it as unbounded.
            debt_cap = math.inf
    return AprioriBounds(
        horizon=T, g_max=g_max, e_cap=e_cap, phi_cap=phi_cap,
        omega_cap=omega_cap, infl_cap=infl_cap, h_cap=h_cap,
        a_m=a_m, b_m=b_m, a_l=a_l, b_l=b_l,
        a_total=a_total, b_total=b_total, debt_cap=debt_cap,
    )
