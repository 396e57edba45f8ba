"""
DML module for cross-fitted orthogonal estimation.

This module contains the outcome regression, the linear functionals and the
orthogonal score, cross fitting with plug-in variance, and the Riesz
regression baseline.
"""

from .outcome import (
    EstimationError,
    OutcomeModel,
    OracleOutcome,
    fit_outcome
)

from .functionals import (
    Functional,
    check_functional,
    m_functional,
    orthogonal_score
)

from .baseline import (
    riesz_regression_baseline,
    riesz_loss
)

from .recipes import (
    METHODS,
    get_recipe
)

from .crossfit import (
    FoldPlan,
    EstimateReport,
    make_fold_plan,
    summarize,
    cross_fit_estimate
)

__all__ = [
    "EstimationError",
    "OutcomeModel",
    "OracleOutcome",
    "fit_outcome",
    "Functional",
    "check_functional",
    "m_functional",
    "orthogonal_score",
    "riesz_regression_baseline",
    "riesz_loss",
    "METHODS",
    "get_recipe",
    "FoldPlan",
    "EstimateReport",
    "make_fold_plan",
    "summarize",
    "cross_fit_estimate"
]
