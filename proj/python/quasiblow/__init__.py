"""Gradient blow-up simulations for u_tt = c(u)^2 u_xx + lambda c(u) c'(u) u_x^2."""

from ._core import (
    ConfigError,
    Constants,
    ProfileModel,
    QuasiblowError,
    RiccatiParams,
    RunConfig,
    SpeedModel,
    Trajectory,
    ValidationError,
    compute_constants,
    estimate_blowup_time,
    parse_config,
    riccati_blowup_time,
    riccati_solve,
    run,
    run_config_file,
    verify,
)

__all__ = [
    "ConfigError",
    "Constants",
    "ProfileModel",
    "QuasiblowError",
    "RiccatiParams",
    "RunConfig",
    "SpeedModel",
    "Trajectory",
    "ValidationError",
    "compute_constants",
    "estimate_blowup_time",
    "parse_config",
    "riccati_blowup_time",
    "riccati_solve",
    "run",
    "run_config_file",
    "verify",
]
