"""Coupled macro-financial simulator: a debt-driven real economy feeding a
jump-diffusion asset market, with the market's trend feeding back into the
lending rate.  Includes closed-form oracles and a Monte Carlo
crisis-probability engine."""

from .analytics import (
    StationaryMoments,
    deterministic_limits,
    jump_ou_moments,
    ou_moments,
    premium_lognormal_mean,
)
from .econ import (
    AprioriBounds,
    EconDerived,
    apriori_bounds,
    clamped_affine,
    econ_vector_field,
    growth_rate,
    inflation,
    profit_ratio,
)
from .integrator import (
    JumpEvent,
    NoiseRecord,
    Trajectory,
    closed_form_market,
    simulate_path,
    step,
)
from .market import (
    JumpIntensities,
    jump_intensities,
    lending_rate,
    log_price_increment_drift,
    premium,
    trend_drift_target,
)
from .montecarlo import (
    CrisisCriterion,
    McResult,
    detect_crisis,
    estimate,
    sweep_1d,
    sweep_2d,
)
from .params import (
    EconState,
    MarketState,
    ModelParams,
    SimConfig,
    default_params,
    default_sim_config,
    load_config,
    serialize,
    validate,
)
from .rng import RngStream

__version__ = "0.1.0"
