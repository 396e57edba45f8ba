"""
Losses module with Monte Carlo estimators of the score matching risks.

This module contains the time score matching and Bregman risks for one-sided
and two-sided bridges, their oracle counterparts, and denoising score matching.
"""

from .weights import (
    LossError,
    ImportanceWeightError,
    WeightFn,
    TimeDistribution,
    BregmanG,
    SigmaDistribution,
    create_time_distribution
)

from .tsm import (
    RiskEstimate,
    TsmBatch,
    TimeScoreObjective,
    tsm_risk,
    two_sided_tsm_risk,
    bregman_risk,
    tsm_risk_oracle,
    oracle_contributions
)

from .dsm import (
    DenoisingObjective,
    dsm_risk,
    reflect_boundary,
    reflected_kernel_score
)

__all__ = [
    "LossError",
    "ImportanceWeightError",
    "WeightFn",
    "TimeDistribution",
    "BregmanG",
    "SigmaDistribution",
    "create_time_distribution",
    "RiskEstimate",
    "TsmBatch",
    "TimeScoreObjective",
    "tsm_risk",
    "two_sided_tsm_risk",
    "bregman_risk",
    "tsm_risk_oracle",
    "oracle_contributions",
    "DenoisingObjective",
    "dsm_risk",
    "reflect_boundary",
    "reflected_kernel_score"
]
