"""
Score models that are linear in their weights: s(x, t) = sum_j w_j phi_j(x, t).
"""

import numpy as np

from .base import ScoreModelError
from .features import FeatureError, features_from_dict


class LinearScoreModel:
    """
    Linear-in-basis time score model.

    Every derivative query is exact since it reduces to the analytic feature
    derivatives. Instances are immutable; `with_params` returns a new model.
    """

    kind = "linear"

    def __init__(self, features, weights=None):
        self.features = features
        if weights is None:
            weights = np.zeros(features.count)
        weights = np.array(weights, dtype=np.float64, copy=True)
        if weights.shape != (features.count,):
            raise ScoreModelError(
                f"Expected {features.count} weights, got shape {weights.shape}")
        weights.setflags(write=False)
        self.weights = weights

    @property
    def dim(self):
        return self.features.dim

    @property
    def params(self):
        return self.weights.copy()

    def with_params(self, params):
        return LinearScoreModel(self.features, params)

    def design(self, x, t):
        try:
            return self.features.evaluate(x, t)
        except FeatureError as e:
            raise ScoreModelError(f"Failed to evaluate features: {e}") from e

    def eval(self, x, t):
        return self.design(x, t).values @ self.weights

    def time_partial(self, x, t):
        return self.design(x, t).dt @ self.weights

    def grad_x(self, x, t):
        return np.einsum("bpk,p->bk", self.design(x, t).dx, self.weights)

    def jet(self, x, t):
        """Value and t-partial in one feature pass."""
        batch = self.design(x, t)
        return batch.values @ self.weights, batch.dt @ self.weights

    def vjp(self, x, t, cot_value, cot_dt=None):
        """Gradient of sum(cot_value * s + cot_dt * ds/dt) in the weights."""
        batch = self.design(x, t)
        grad = batch.values.T @ np.asarray(cot_value, dtype=np.float64)
        if cot_dt is not None:
            grad = grad + batch.dt.T @ np.asarray(cot_dt, dtype=np.float64)
        return grad

    def to_dict(self):
        return {"kind": self.kind, "features": self.features.to_dict(),
                "params": self.weights.tolist()}

    @classmethod
    def from_dict(cls, data):
        return cls(features_from_dict(data["features"]), data["params"])
