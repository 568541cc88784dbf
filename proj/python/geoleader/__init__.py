"""Geometric leader election: exact laws, boundary kernels and samplers."""

from ._core import (
    CertificationError,
    ConfigError,
    cdf_f,
    duration_dist,
    entrance_duration,
    extended_kernel_n,
    extended_kernel_y,
    finite_kernel_n,
    finite_kernel_y,
    h_transform_pmf,
    joint_dist_ml,
    kernel_numerator,
    n_step_pmf,
    periodicity_scan,
    prob_unique_winner,
    rounds_dist,
    run_cli,
    sample_w,
    simulate_conditioned_y,
    simulate_election,
)

__all__ = [name for name in dir() if not name.startswith("_")]
