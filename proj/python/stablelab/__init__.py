"""Stable limit lab: alpha-stable laws, associated moving averages, M1 path metrics."""

from ._core import (  # noqa: F401
    ConfigError,
    ContractError,
    DomainError,
    MAProcessSpec,
    NumericError,
    StableParams,
    StepPath,
    build_partial_sum_path,
    cdf,
    cf,
    config_hash,
    j1_distance,
    limit_mu_inf,
    m1_distance,
    marginal_params,
    normalizing_constant,
    sample,
    simulate_path,
    sum_spectral,
    sup_functional,
    uniform_distance,
    verify_tangent_convergence,
)

__version__ = "0.1.0"
