"""Fractional-step kinetic Monte Carlo for lattice systems."""

from ._core import (
    ConfigError,
    ResourceError,
    RunConfig,
    TrajectoryStats,
    UsageError,
    cli_main,
    exact_curve,
    fit_loglog,
    generators,
    load_config,
    parse_config,
    run_ensemble,
    splitting_curve,
    weak_error,
)

__all__ = [
    "ConfigError",
    "ResourceError",
    "RunConfig",
    "TrajectoryStats",
    "UsageError",
    "cli_main",
    "exact_curve",
    "fit_loglog",
    "generators",
    "load_config",
    "parse_config",
    "run_ensemble",
    "splitting_curve",
    "weak_error",
]
