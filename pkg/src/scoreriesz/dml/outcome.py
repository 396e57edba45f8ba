"""
Outcome regression gamma(d, z) = E[Y | D = d, Z = z].

Ridge regression on polynomial features of (d, z); the derivative in d is
analytic, read off the exponent table of the polynomial expansion.
"""

import numpy as np
from sklearn.linear_model import Ridge
from sklearn.preprocessing import PolynomialFeatures

from ..models.features import monomials


class EstimationError(Exception):
    """Exception raised for errors in nuisance fitting or orthogonal estimation."""
    pass


def _regressors(d, z):
    d = np.atleast_1d(np.asarray(d, dtype=np.float64))
    z = np.asarray(z, dtype=np.float64).reshape(len(d), -1)
    return np.column_stack([d, z])


class OutcomeModel:
    """Fitted polynomial ridge regression exposing gamma and d gamma / dd."""

    def __init__(self, expansion, regression):
        self.expansion = expansion
        self.regression = regression
        self.powers = expansion.powers_.astype(np.int64)

    def predict(self, d, z):
        return self.regression.predict(self.expansion.transform(_regressors(d, z)))

    def d_derivative(self, d, z):
        _, grads = monomials(_regressors(d, z), self.powers)
        return grads[:, :, 0] @ self.regression.coef_


class OracleOutcome:
    """Known outcome function and its d-derivative, in the OutcomeModel interface."""

    def __init__(self, gamma, d_gamma):
        self.gamma = gamma
        self.d_gamma = d_gamma

    def predict(self, d, z):
        x = _regressors(d, z)
        return np.asarray(self.gamma(x[:, 0], x[:, 1:]), dtype=np.float64)

    def d_derivative(self, d, z):
        x = _regressors(d, z)
        return np.asarray(self.d_gamma(x[:, 0], x[:, 1:]), dtype=np.float64)


def fit_outcome(dataset, degree=2, ridge=1e-6):
    """
    Fit gamma on all rows of `dataset` (pass the training split).

    Args:
        dataset: Dataset
        degree: polynomial degree in (d, z)
        ridge: ridge penalty, must be positive

    Returns:
        OutcomeModel
    """
    if dataset.n < 2:
        raise EstimationError("Outcome regression needs at least two rows")
    expansion = PolynomialFeatures(degree=degree, include_bias=False)
    try:
        features = expansion.fit_transform(dataset.regressors)
        regression = Ridge(alpha=ridge, fit_intercept=True).fit(features, dataset.outcomes)
    except (ValueError, np.linalg.LinAlgError) as e:
        raise EstimationError(f"Failed to fit outcome regression: {e}") from e
    if not np.all(np.isfinite(regression.coef_)):
        raise EstimationError("Outcome regression produced non-finite coefficients")
    return OutcomeModel(expansion, regression)
