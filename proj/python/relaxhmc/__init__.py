"""HMC sampling from constraint-relaxed posteriors."""

from relaxhmc._core import (
    Chain,
    OracleResult,
    RelaxedTarget,
    bessel_i1_over_i0,
    ess,
    experiment_names,
    factor_network,
    gaussian_inequality,
    relaxed_expectation,
    run_experiment,
    sample,
    sharp_expectation,
    simplex_toy,
    sphere_gaussian,
    sphere_t,
    torus_uniform,
    truncated_normal_moments,
)

__all__ = [
    "Chain",
    "OracleResult",
    "RelaxedTarget",
    "bessel_i1_over_i0",
    "ess",
    "experiment_names",
    "factor_network",
    "gaussian_inequality",
    "relaxed_expectation",
    "run_experiment",
    "sample",
    "sharp_expectation",
    "simplex_toy",
    "sphere_gaussian",
    "sphere_t",
    "torus_uniform",
    "truncated_normal_moments",
]
