"""
Linear functionals m(W, gamma) and the Neyman orthogonal score.
"""

from enum import Enum

import numpy as np

from .outcome import EstimationError


class Functional(str, Enum):
    ATE = "ATE"
    AME = "AME"
    APE = "APE"


def check_functional(kind, dataset):
    """Raise EstimationError when the functional does not fit the treatment type."""
    kind = Functional(kind)
    if kind is Functional.ATE and not dataset.is_binary:
        raise EstimationError("The ATE needs a binary treatment")
    if kind is not Functional.ATE and dataset.is_binary:
        raise EstimationError(f"The {kind.value} needs a continuous treatment")
    return kind


def m_functional(kind, outcome, d, z, alpha=None, alpha_values=None):
    """
    Per-row m(W, gamma).

    ATE: gamma(1, z) - gamma(-1, z). AME: d gamma / dd at (d, z).
    APE: gamma(d, z) * alpha(d, z), where alpha is the estimated density
    ratio (p1 - p-1) / p0; `alpha_values` supplies it already evaluated.
    """
    kind = Functional(kind)
    d = np.atleast_1d(np.asarray(d, dtype=np.float64))
    if kind is Functional.ATE:
        return outcome.predict(np.ones_like(d), z) - outcome.predict(-np.ones_like(d), z)
    if kind is Functional.AME:
        return outcome.d_derivative(d, z)
    if alpha_values is None:
        if alpha is None:
            raise EstimationError("The APE functional needs the estimated density ratio")
        alpha_values = alpha(d, z)
    return outcome.predict(d, z) * alpha_values


def orthogonal_score(alpha, outcome, kind, y, d, z, theta=0.0, alpha_values=None):
    """
    psi = alpha(x) (y - gamma(x)) + m(W, gamma) - theta, per row.

    The representer is evaluated once; pass `alpha_values` to reuse values
    computed by the caller.
    """
    if alpha_values is None:
        alpha_values = alpha(d, z)
    residual = np.asarray(y, dtype=np.float64) - outcome.predict(d, z)
    return (alpha_values * residual
            + m_functional(kind, outcome, d, z, alpha_values=alpha_values) - theta)
