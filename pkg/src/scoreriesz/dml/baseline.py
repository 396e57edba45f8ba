"""
Riesz regression baseline.

A linear representer alpha(x) = b(x) . rho minimizing
E[alpha(X)^2] - 2 E[m(W, alpha)] + tau |rho|^2 has the closed form
rho = (G + tau I)^-1 M with G = E[b b^T] and M = E[m(W, b)].
"""

import numpy as np
from scipy import linalg
from sklearn.preprocessing import PolynomialFeatures

from ..models.features import monomials
from ..riesz import RieszEstimate, RieszMethod
from .functionals import Functional, check_functional
from .outcome import EstimationError


def _powers(dim, degree):
    expansion = PolynomialFeatures(degree=degree, include_bias=True)
    expansion.fit(np.zeros((1, dim)))
    return expansion.powers_.astype(np.int64)


class AteBasis:
    """b(d, z) = (1[d = 1] f(z), 1[d = -1] f(z)) with f polynomial in z."""

    def __init__(self, dim_z, degree):
        self.powers = _powers(max(dim_z, 1), degree)
        self.dim_z = dim_z

    def _f(self, z):
        z = z if self.dim_z else np.zeros((len(z), 1))
        return monomials(z, self.powers, with_grad=False)[0]

    def __call__(self, d, z):
        f = self._f(z)
        return np.column_stack([(d == 1.0)[:, None] * f, (d == -1.0)[:, None] * f])

    def functional(self, d, z):
        f = self._f(z)
        return np.column_stack([f, -f])


class AmeBasis:
    """b(d, z) polynomial in (d, z); m(W, b) = d b / dd."""

    def __init__(self, dim_z, degree):
        self.powers = _powers(1 + dim_z, degree)

    def __call__(self, d, z):
        return monomials(np.column_stack([d, z]), self.powers, with_grad=False)[0]

    def functional(self, d, z):
        return monomials(np.column_stack([d, z]), self.powers)[1][:, :, 0]


def riesz_regression_baseline(dataset, kind, degree=2, ridge=1e-6):
    """
    Closed-form Riesz regression over a polynomial basis.

    Args:
        dataset: training split
        kind: "ATE" or "AME"
        degree: polynomial degree of the basis
        ridge: tau

    Returns:
        RieszEstimate tagged Baseline
    """
    kind = check_functional(kind, dataset)
    if kind is Functional.APE:
        raise EstimationError("Riesz regression baseline supports ATE and AME only")
    basis = (AteBasis if kind is Functional.ATE else AmeBasis)(dataset.dim_z, degree)
    d, z = dataset.treatments, dataset.covariates
    b = basis(d, z)
    gram = b.T @ b / dataset.n
    moments = basis.functional(d, z).mean(axis=0)
    try:
        rho = linalg.solve(gram + ridge * np.eye(len(moments)), moments, assume_a="sym")
    except (linalg.LinAlgError, ValueError) as e:
        raise EstimationError(f"Failed to solve the Riesz regression: {e}") from e

    def alpha(d, z):
        return basis(d, z) @ rho

    return RieszEstimate(alpha, RieszMethod.BASELINE,
                         {"functional": kind.value, "degree": degree, "ridge": ridge})


def riesz_loss(kind, alpha, d, z, step=1e-5):
    """
    Empirical Riesz regression objective mean(alpha^2) - 2 mean(m(W, alpha)).

    The AME derivative uses a central difference with the given step.
    """
    kind = Functional(kind)
    d = np.asarray(d, dtype=np.float64)
    if kind is Functional.ATE:
        m = alpha(np.ones_like(d), z) - alpha(-np.ones_like(d), z)
    elif kind is Functional.AME:
        m = (alpha(d + step, z) - alpha(d - step, z)) / (2.0 * step)
    else:
        raise EstimationError("Riesz regression objective covers ATE and AME only")
    return float(np.mean(alpha(d, z) ** 2) - 2.0 * np.mean(m))
