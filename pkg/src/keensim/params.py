"""Model parameters, simulation controls, and the flat config format.

Every other module reads parameters only through :class:`ModelParams` and
:class:`SimConfig`.  Both are frozen dataclasses and safe to share across
concurrent workers.
"""

from __future__ import annotations

import dataclasses
import math
from dataclasses import dataclass, field

import numpy as np

__all__ = [
    "ModelParams",
    "EconState",
    "MarketState",
    "SimConfig",
    "Violation",
    "ConfigError",
    "ConfigValidationError",
    "default_params",
    "default_sim_config",
    "validate",
    "load_config",
    "serialize",
]


@dataclass(frozen=True)
class EconState:
    """Real-economy ratios: wage share, employment rate, deposit and loan ratios."""

    omega: float
    e: float
    m: float
    ell: float


@dataclass(frozen=True)
class MarketState:
    """Asset price and trend indicator."""

    s: float
    mu: float


@dataclass(frozen=True)
class ModelParams:
    """All structural model constants.

    Rates carry units of 1/years, ratios are dimensionless, and ``psi_1``
    has units of years (it multiplies a growth rate).
    """

    nu: float = 2.7            # capital-to-output ratio, years
    delta: float = 0.04        # capital depreciation rate
    r_m: float = 0.01          # deposit rate
    kappa_min: float = 0.0     # investment function clamps/affine constants
    kappa_max: float = 0.3
    kappa_0: float = 0.0318
    kappa_1: float = 0.575
    delta_min: float = 0.0     # dividend function clamps/affine constants
    delta_max: float = 0.3
    delta_0: float = -0.078
    delta_1: float = 0.553
    zeta: float = 0.8          # loan-financed share of net investment
    kappa_l: float = 0.02      # loan repayment rate
    psi_min: float = -0.15     # speculative flow clamps/affine constants
    psi_max: float = 0.3
    psi_0: float = -0.075
    psi_1: float = 3.75        # years
    alpha: float = 0.02        # productivity growth
    beta: float = 0.02         # workforce growth
    gamma: float = 0.9         # money-illusion degree
    eta_p: float = 0.192       # price adjustment speed
    xi: float = 1.875          # markup
    phi_0: float = -0.292      # Phillips curve intercept/slope
    phi_1: float = 0.469
    r_l: float = 0.02          # baseline funding rate
    sigma: float = 0.1         # diffusion volatility, 1/sqrt(years)
    j_up: float = 0.1          # size of a *downward* price jump (lambda^+ leg)
    j_down: float = 0.1        # size of an *upward* price jump (lambda^- leg)
    lambda_up: float = 1.0     # intensity scale of downward price jumps
    lambda_down: float = 1.0   # intensity scale of upward price jumps
    eta_mu: float = 0.5        # trend mean-reversion speed
    r_max: float = 0.2         # lending rate cap
    rho_1: float = 0.01        # premium scale
    rho_2: float = 5.0         # premium sensitivity, years

    def as_vector(self) -> np.ndarray:
        """Pack the parameters into a float64 vector for the numba kernels."""
        return np.array([getattr(self, f.name) for f in dataclasses.fields(self)],
                        dtype=np.float64)


# Index constants into the packed parameter vector, used by the jit kernels.
_PARAM_NAMES = tuple(f.name for f in dataclasses.fields(ModelParams))
for _i, _name in enumerate(_PARAM_NAMES):
    globals()["IDX_" + _name.upper()] = _i
del _i, _name


@dataclass(frozen=True)
class SimConfig:
    """Simulation controls: horizon, step, seed, initial conditions, stride.

    Defaults: 150-year horizon, dt = 0.005 years (so the largest per-step
    jump probability at base parameters is lambda_max * dt = 0.0015), one
    recorded sample every 0.1 years.  The default initial state sits near
    the benign equilibrium of the base calibration, so deterministic runs
    settle well within the default horizon; transient spiral modes damp
    with a time constant of roughly ninety years, so a start far from the
    equilibrium is still visibly oscillating at t = 150.  The initial
    conditions are configurable and carry no special meaning.
    """

    t_end: float = 150.0
    dt: float = 0.005
    seed: int = 0
    init_econ: EconState = field(default_factory=lambda: EconState(0.555, 0.667, 6.35, 3.99))
    init_market: MarketState = field(default_factory=lambda: MarketState(1.0, 0.02))
    record_stride: int = 20

    @property
    def n_steps(self) -> int:
        return int(round(self.t_end / self.dt))


def default_params() -> ModelParams:
    """Base parameter values."""
    return ModelParams()


def default_sim_config(p: ModelParams | None = None) -> SimConfig:
    """Default controls; the trend indicator starts at the baseline rate."""
    if p is None:
        p = default_params()
    return SimConfig(init_market=MarketState(1.0, p.r_l))


@dataclass(frozen=True)
class Violation:
    """One parameter-range violation; data, not a failure."""

    name: str
    value: float
    allowed: str

    def __str__(self) -> str:
        return f"{self.name} = {self.value!r} outside allowed range {self.allowed}"


# Per-field range checks: (predicate, human-readable range).
_RANGES = {
    "nu": (lambda p: p.nu > 0, "(0, inf)"),
    "delta": (lambda p: p.delta >= 0, "[0, inf)"),
    "r_m": (lambda p: p.r_m >= 0, "[0, inf)"),
    "kappa_min": (lambda p: -1 <= p.kappa_min <= 0, "[-1, 0]"),
    "kappa_max": (lambda p: 0 <= p.kappa_max <= 1, "[0, 1]"),
    "delta_min": (lambda p: -1 <= p.delta_min <= 0, "[-1, 0]"),
    "delta_max": (lambda p: 0 <= p.delta_max <= 1, "[0, 1]"),
    "delta_1": (lambda p: p.delta_1 >= 0, "[0, inf)"),
    "zeta": (lambda p: 0 <= p.zeta <= 1, "[0, 1]"),
    "kappa_l": (lambda p: 0 <= p.kappa_l <= 1, "[0, 1]"),
    "psi_min": (lambda p: -1 <= p.psi_min <= 0, "[-1, 0]"),
    "psi_max": (lambda p: 0 <= p.psi_max <= 1, "[0, 1]"),
    "psi_1": (lambda p: p.psi_1 >= 0, "[0, inf)"),
    "gamma": (lambda p: 0 <= p.gamma <= 1, "[0, 1]"),
    "eta_p": (lambda p: p.eta_p > 0, "(0, inf)"),
    "xi": (lambda p: p.xi >= 1, "[1, inf)"),
    "r_l": (lambda p: 0 <= p.r_l <= p.r_max, "[0, r_max]"),
    "sigma": (lambda p: p.sigma >= 0, "[0, inf)"),
    # Strict bounds on j_up keep the price strictly positive after any jump.
    "j_up": (lambda p: 0 < p.j_up < 1, "(0, 1)"),
    "j_down": (lambda p: 0 < p.j_down <= 1, "(0, 1]"),
    "lambda_up": (lambda p: p.lambda_up >= 0, "[0, inf)"),
    "lambda_down": (lambda p: p.lambda_down >= 0, "[0, inf)"),
    "eta_mu": (lambda p: p.eta_mu > 0, "(0, inf)"),
    "r_max": (lambda p: p.r_max >= 0, "[0, inf)"),
    "rho_1": (lambda p: p.rho_1 >= 0, "[0, inf)"),
    "rho_2": (lambda p: p.rho_2 >= 0, "[0, inf)"),
}

_ORDERINGS = (
    ("kappa_min", "kappa_max"),
    ("delta_min", "delta_max"),
    ("psi_min", "psi_max"),
)


def validate(p: ModelParams) -> list[Violation]:
    """Range-check every field; returns one violation per offending field."""
    out: list[Violation] = []
    for name, (ok, allowed) in _RANGES.items():
        value = getattr(p, name)
        if not math.isfinite(value) or not ok(p):
            out.append(Violation(name, value, allowed))
    for lo, hi in _ORDERINGS:
        if getattr(p, lo) > getattr(p, hi):
            out.append(Violation(lo, getattr(p, lo), f"<= {hi}"))
    for name in _PARAM_NAMES:
        value = getattr(p, name)
        if not math.isfinite(value) and name not in _RANGES:
            out.append(Violation(name, value, "finite"))
    return out


class ConfigError(ValueError):
    """Raised on a malformed or unknown config entry; carries the line number."""

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class ConfigValidationError(ValueError):
    """Raised when a parsed config fails range validation."""

    def __init__(self, violations: list[Violation]):
        self.violations = violations
        super().__init__("; ".join(str(v) for v in violations))


_SIM_KEYS = ("t_end", "dt", "seed", "record_stride",
             "omega0", "e0", "m0", "ell0", "s0", "mu0")


def load_config(text: str) -> tuple[ModelParams, SimConfig]:
    """Parse a flat ``key = value`` document with ``#`` comments.

    Unspecified keys take defaults; unknown keys are an error.  ``mu0``
    defaults to the (possibly overridden) baseline rate ``r_l``.
    """
    overrides: dict[str, float] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"expected 'key = value', got {raw.strip()!r}", lineno)
        key, _, value_str = line.partition("=")
        key = key.strip()
        value_str = value_str.strip()
        if key not in _PARAM_NAMES and key not in _SIM_KEYS:
            raise ConfigError(f"unknown key {key!r}", lineno)
        if key in overrides:
            raise ConfigError(f"duplicate key {key!r}", lineno)
        try:
            if key in ("seed", "record_stride"):
                value = int(value_str, 0)
            else:
                value = float(value_str)
        except ValueError:
            raise ConfigError(f"cannot parse value {value_str!r} for {key!r}", lineno)
        overrides[key] = value
    return resolve_config(overrides)


def resolve_config(overrides: dict[str, float]) -> tuple[ModelParams, SimConfig]:
    """Apply key-value overrides on top of defaults and validate the result."""
    param_over = {k: float(v) for k, v in overrides.items() if k in _PARAM_NAMES}
    p = dataclasses.replace(default_params(), **param_over)
    violations = validate(p)

    t_end = float(overrides.get("t_end", 150.0))
    dt = float(overrides.get("dt", 0.005))
    seed = int(overrides.get("seed", 0))
    stride = int(overrides.get("record_stride", 20))
    if not (0 < dt <= t_end):
        violations.append(Violation("dt", dt, "(0, t_end]"))
    if stride < 1:
        violations.append(Violation("record_stride", stride, ">= 1"))
    if not (0 <= seed < 2**64):
        violations.append(Violation("seed", seed, "[0, 2^64)"))
    if violations:
        raise ConfigValidationError(violations)

    init_econ = EconState(
        omega=float(overrides.get("omega0", 0.555)),
        e=float(overrides.get("e0", 0.667)),
        m=float(overrides.get("m0", 6.35)),
        ell=float(overrides.get("ell0", 3.99)),
    )
    init_market = MarketState(
        s=float(overrides.get("s0", 1.0)),
        mu=float(overrides.get("mu0", p.r_l)),
    )
    cfg = SimConfig(t_end=t_end, dt=dt, seed=seed,
                    init_econ=init_econ, init_market=init_market,
                    record_stride=stride)
    return p, cfg


def serialize(p: ModelParams, cfg: SimConfig) -> str:
    """Emit a config document that parses back to the same (params, config)."""
    lines = [f"{name} = {getattr(p, name)!r}" for name in _PARAM_NAMES]
    lines += [
        f"t_end = {cfg.t_end!r}",
        f"dt = {cfg.dt!r}",
        f"seed = {cfg.seed}",
        f"record_stride = {cfg.record_stride}",
        f"omega0 = {cfg.init_econ.omega!r}",
        f"e0 = {cfg.init_econ.e!r}",
        f"m0 = {cfg.init_econ.m!r}",
        f"ell0 = {cfg.init_econ.ell!r}",
        f"s0 = {cfg.init_market.s!r}",
        f"mu0 = {cfg.init_market.mu!r}",
    ]
    return "\n".join(lines) + "\n"


def header_line(p: ModelParams, cfg: SimConfig, **extra) -> str:
    """One-line ``#`` comment carrying the full resolved parameter set.

    Embedded in every CSV output so files are self-describing; no
    timestamps, so re-running reproduces outputs byte-for-byte.
    """
    items = [f"{name}={getattr(p, name)!r}" for name in _PARAM_NAMES]
    items += [
        f"t_end={cfg.t_end!r}", f"dt={cfg.dt!r}", f"seed={cfg.seed}",
        f"record_stride={cfg.record_stride}",
        f"omega0={cfg.init_econ.omega!r}", f"e0={cfg.init_econ.e!r}",
        f"m0={cfg.init_econ.m!r}", f"ell0={cfg.init_econ.ell!r}",
        f"s0={cfg.init_market.s!r}", f"mu0={cfg.init_market.mu!r}",
    ]
    items += [f"{k}={v}" for k, v in extra.items()]
    return "# " + " ".join(items)
