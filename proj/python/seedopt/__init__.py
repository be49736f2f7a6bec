"""Seed-train simulation and multi-objective Bayesian optimization."""

from ._core import (
    ConfigError,
    GpModel,
    IntegrationError,
    ModelParameters,
    RunConfig,
    ThresholdUnreachable,
    culture_rhs,
    hypervolume,
    latin_hypercube,
    optimize,
    pareto_filter,
    run_optimize,
    run_reference,
    run_simulate,
    simulate,
    state_names,
)

__all__ = [
    "ConfigError",
    "GpModel",
    "IntegrationError",
    "ModelParameters",
    "RunConfig",
    "ThresholdUnreachable",
    "culture_rhs",
    "hypervolume",
    "latin_hypercube",
    "optimize",
    "pareto_filter",
    "run_optimize",
    "run_reference",
    "run_simulate",
    "simulate",
    "state_names",
]
