"""
Models module for parameterized time score functions.

This module contains the feature maps, the linear and MLP score models, and
the derivative queries the losses need.
"""

from .features import (
    FeatureBatch,
    FeatureError,
    LEFT_OF_ZERO,
    PolynomialTimeFeatures,
    RbfTimeFeatures,
    create_rbf_features
)

from .base import (
    ScoreModelError,
    CallableScoreModel,
    total_time_derivative,
    param_grad
)

from .linear import LinearScoreModel

from .mlp import MlpScoreModel

from .checkpoint import (
    create_score_model,
    save_model,
    load_model
)

__all__ = [
    "FeatureBatch",
    "FeatureError",
    "LEFT_OF_ZERO",
    "PolynomialTimeFeatures",
    "RbfTimeFeatures",
    "create_rbf_features",
    "ScoreModelError",
    "CallableScoreModel",
    "total_time_derivative",
    "param_grad",
    "LinearScoreModel",
    "MlpScoreModel",
    "create_score_model",
    "save_model",
    "load_model"
]
