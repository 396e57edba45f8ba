"""
Bridges module for constructing bridge random variables.

This module contains the interpolation schedules, the samplers that draw
X_t from endpoint samples, and analytic Gaussian oracles for the bridge laws.
"""

from .schedules import (
    BetaSchedule,
    ScheduleKind,
    BridgeError,
    DomainError,
    create_schedule
)

from .samplers import (
    BridgeSampler,
    EmpiricalSource,
    GaussianSource,
    PolicySource,
    ShiftPolicy,
    EndpointPair,
    AmeContext,
    sample_bridge,
    sample_ame_bridge,
    create_one_sided_sampler,
    create_ate_sampler,
    create_ape_sampler,
    create_ame_sampler
)

from .oracles import (
    GaussianComponent,
    GaussianMixtureBridgeOracle,
    ConditionalGaussianAmeOracle,
    DegenerateLawError,
    oracle_time_score,
    telescoped_log_ratio,
    adjacent_log_odds,
    create_gaussian_oracle,
    create_ate_mixture_oracle
)

__all__ = [
    "BetaSchedule",
    "ScheduleKind",
    "BridgeError",
    "DomainError",
    "create_schedule",
    "BridgeSampler",
    "EmpiricalSource",
    "GaussianSource",
    "PolicySource",
    "ShiftPolicy",
    "EndpointPair",
    "AmeContext",
    "sample_bridge",
    "sample_ame_bridge",
    "create_one_sided_sampler",
    "create_ate_sampler",
    "create_ape_sampler",
    "create_ame_sampler",
    "GaussianComponent",
    "GaussianMixtureBridgeOracle",
    "ConditionalGaussianAmeOracle",
    "DegenerateLawError",
    "oracle_time_score",
    "telescoped_log_ratio",
    "adjacent_log_odds",
    "create_gaussian_oracle",
    "create_ate_mixture_oracle"
]
