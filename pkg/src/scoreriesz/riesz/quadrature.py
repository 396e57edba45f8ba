"""
Trapezoid quadrature of learned time scores.
"""

from dataclasses import dataclass

import numpy as np
from scipy.integrate import trapezoid

from ..models import LEFT_OF_ZERO


class RieszError(Exception):
    """Exception raised for errors while forming Riesz representers."""
    pass


@dataclass(frozen=True)
class Quadrature:
    """
    Trapezoid rule with an odd number of nodes.

    Nodes outside `window` (the time range the model was trained on) are
    clipped into it, so the score is held at its boundary value there.
    """

    points: int = 129
    window: tuple = None

    def __post_init__(self):
        if self.points < 3 or self.points % 2 == 0:
            raise RieszError(f"Quadrature needs an odd number of points >= 3, got {self.points}")

    def nodes(self, a, b):
        return np.linspace(a, b, self.points)

    def evaluation_times(self, a, b):
        t = self.nodes(a, b)
        if max(a, b) <= 0.0:
            t = np.where(t == 0.0, LEFT_OF_ZERO, t)
        if self.window is not None:
            t = np.clip(t, self.window[0], self.window[1])
        return t


def integrate_time_score(model, x, a, b, quad, with_error=False):
    """
    Trapezoid approximation of the integral of s(x, t) over t from a to b.

    Args:
        model: score model with eval(x, t)
        x: points of shape (B, dim)
        a, b: limits; b < a integrates backwards
        quad: Quadrature
        with_error: also return the Richardson error estimate
            |I_K - I_(K+1)/2| / 3 per point

    Returns:
        Integrals of shape (B,), or a tuple (integrals, errors)
    """
    x = np.atleast_2d(np.asarray(x, dtype=np.float64))
    nodes = quad.nodes(a, b)
    times = quad.evaluation_times(a, b)
    k = len(nodes)
    values = model.eval(np.repeat(x, k, axis=0), np.tile(times, len(x))).reshape(len(x), k)
    integral = trapezoid(values, nodes, axis=1)
    if not with_error:
        return integral
    coarse = trapezoid(values[:, ::2], nodes[::2], axis=1)
    return integral, np.abs(integral - coarse) / 3.0


def integrate_along_treatment(score, d, z, upper, points=129):
    """
    Integral of u -> score(u, z) from u = d to u = upper, per row.

    Args:
        score: callable (u, z) -> values, vectorized over rows
        d: lower limits, shape (n,)
        z: covariates, shape (n, d_z)
        upper: scalar upper limit
        points: trapezoid nodes per row
    """
    d = np.atleast_1d(np.asarray(d, dtype=np.float64))
    z = np.asarray(z, dtype=np.float64).reshape(len(d), -1)
    fractions = np.linspace(0.0, 1.0, points)
    grid = d[:, None] + (upper - d)[:, None] * fractions[None, :]
    values = np.asarray(score(grid.ravel(), np.repeat(z, points, axis=0)),
                        dtype=np.float64).reshape(len(d), points)
    return trapezoid(values, grid, axis=1)
