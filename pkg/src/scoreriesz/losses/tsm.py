"""
Time score matching risks.

For a bridge on [a, b] with weighting lambda and reference density q, the
risk of a score model s, up to a model-independent constant, is

    E[lambda(a) g'(s(X_a, a))] - E[lambda(b) g'(s(X_b, b))]
    + E_t~q[ (lambda (g'(s) s - g(s) + g''(s) d_t s) + lambda' g'(s)) / q(t) ]

with g(a) = a^2 / 2 for plain time score matching. d_t s is the partial
derivative in t at fixed x, evaluated at x = X_t. One-sided and two-sided
bridges share this form; for two-sided bridges a = -1 and b = 1, and a score
that jumps at t = 0 adds

    lambda(0) E[g'(s(X_0, 0+)) - g'(s(X_0, 0-))],  X_0 ~ p0

from integrating by parts on each side of the origin.

Boundary mode "endpoint" evaluates the boundary terms at the domain ends with
endpoint draws; "truncated" evaluates them at the ends of the support of q,
which makes the risk exactly half the oracle squared error plus a constant on
that window.
"""

import logging
from dataclasses import dataclass

import numpy as np

from ..models import LEFT_OF_ZERO, param_grad
from .weights import (
    BregmanG,
    ImportanceWeightError,
    LossError,
    WeightFn,
    create_time_distribution,
)

logger = logging.getLogger(__name__)

BOUNDARY_MODES = ("endpoint", "truncated")


@dataclass(frozen=True)
class RiskEstimate:
    """Monte Carlo risk value, its parameter gradient and standard error."""

    loss: float
    grad: np.ndarray
    stderr: float


@dataclass(frozen=True)
class TsmBatch:
    """
    Boundary draws, interior bridge draws and their weights.

    `x_mid` holds draws from p0 for the jump term at t = 0; it is None when the
    boundary window does not straddle the origin.
    """

    x_lo: np.ndarray
    t_lo: float
    lam_lo: float
    x_hi: np.ndarray
    t_hi: float
    lam_hi: float
    x_t: np.ndarray
    t: np.ndarray
    weight: np.ndarray
    lam_t: np.ndarray
    dlam_t: np.ndarray
    x_mid: np.ndarray = None
    lam_mid: float = 0.0

    @property
    def size(self):
        return len(self.t)


class TimeScoreObjective:
    """
    Time score matching objective over one bridge sampler.

    Args:
        sampler: BridgeSampler
        weight_fn: WeightFn, constant by default
        time_dist: TimeDistribution, uniform on the truncated domain by default
        g: BregmanG, quadratic by default
        boundary: "endpoint" or "truncated"
        batch_size: draws per call
        truncation: epsilon used for the default time distribution
    """

    def __init__(self, sampler, weight_fn=None, time_dist=None, g=None,
                 boundary="endpoint", batch_size=512, truncation=0.01):
        if boundary not in BOUNDARY_MODES:
            raise LossError(f"Unknown boundary mode: {boundary}")
        self.sampler = sampler
        self.weight_fn = weight_fn or WeightFn("constant", two_sided=sampler.two_sided)
        self.time_dist = time_dist or create_time_distribution(sampler.domain, truncation)
        self.g = g or BregmanG("quadratic")
        self.boundary = boundary
        self.batch_size = int(batch_size)

    @property
    def boundary_times(self):
        if self.boundary == "truncated":
            return self.time_dist.low, self.time_dist.high
        return self.sampler.domain

    def draw(self, rng, size=None):
        """
        Draw a batch: interior times first, then bridge points, then boundaries,
        then p0 draws for the jump term of two-sided bridges.
        """
        size = self.batch_size if size is None else int(size)
        t = self.time_dist.sample(rng, size)
        density = self.time_dist.density(t)
        if np.any(density <= 0.0):
            raise ImportanceWeightError(
                f"Reference density vanishes at sampled t={t[density <= 0.0][0]:g}")
        x_t, _, _ = self.sampler.draw(t, rng)
        t_lo, t_hi = self.boundary_times
        x_lo, _, _ = self.sampler.draw(np.full(size, t_lo), rng)
        x_hi, _, _ = self.sampler.draw(np.full(size, t_hi), rng)
        lam = self.weight_fn
        x_mid, lam_mid = None, 0.0
        if self.sampler.two_sided and t_lo < 0.0 < t_hi and lam(0.0) != 0.0:
            x_mid, _, _ = self.sampler.draw(np.zeros(size), rng)
            lam_mid = float(lam(0.0))
        return TsmBatch(
            x_lo=x_lo, t_lo=float(t_lo), lam_lo=float(lam(t_lo)),
            x_hi=x_hi, t_hi=float(t_hi), lam_hi=float(lam(t_hi)),
            x_t=x_t, t=t, weight=1.0 / density, lam_t=lam(t), dlam_t=lam.derivative(t),
            x_mid=x_mid, lam_mid=lam_mid,
        )

    def contributions(self, model, batch):
        """
        Per-draw terms (lower boundary, upper boundary, jump at t = 0, interior);
        the risk is the sum of their means.
        """
        g = self.g
        lo = np.zeros(batch.size)
        hi = np.zeros(batch.size)
        if batch.lam_lo != 0.0:
            lo = batch.lam_lo * g.g1(model.eval(batch.x_lo, batch.t_lo))
        if batch.lam_hi != 0.0:
            hi = -batch.lam_hi * g.g1(model.eval(batch.x_hi, batch.t_hi))
        jump = np.zeros(batch.size)
        if batch.x_mid is not None:
            jump = batch.lam_mid * (g.g1(model.eval(batch.x_mid, 0.0))
                                    - g.g1(model.eval(batch.x_mid, LEFT_OF_ZERO)))
        s, ds = model.jet(batch.x_t, batch.t)
        interior = batch.weight * (
            batch.lam_t * (g.g1(s) * s - g.g(s) + g.g2(s) * ds) + batch.dlam_t * g.g1(s))
        return lo, hi, jump, interior

    def risk(self, model, batch):
        """Risk value, parameter gradient and Monte Carlo standard error on a batch."""
        terms = self.contributions(model, batch)
        size = batch.size
        loss = float(sum(term.mean() for term in terms))
        stderr = float(np.sqrt(sum(term.var() for term in terms) / size))

        g = self.g
        grad = np.zeros_like(model.params)
        if batch.lam_lo != 0.0:
            s_lo = model.eval(batch.x_lo, batch.t_lo)
            grad += param_grad(model, batch.x_lo, batch.t_lo, batch.lam_lo * g.g2(s_lo) / size)
        if batch.lam_hi != 0.0:
            s_hi = model.eval(batch.x_hi, batch.t_hi)
            grad += param_grad(model, batch.x_hi, batch.t_hi, -batch.lam_hi * g.g2(s_hi) / size)
        if batch.x_mid is not None:
            for t_side, sign in ((0.0, 1.0), (LEFT_OF_ZERO, -1.0)):
                s_side = model.eval(batch.x_mid, t_side)
                grad += param_grad(model, batch.x_mid, t_side,
                                   sign * batch.lam_mid * g.g2(s_side) / size)
        s, ds = model.jet(batch.x_t, batch.t)
        w, lam, dlam = batch.weight, batch.lam_t, batch.dlam_t
        cot_value = w * (lam * (g.g2(s) * s + g.g3(s) * ds) + dlam * g.g2(s)) / size
        cot_dt = w * lam * g.g2(s) / size
        grad += param_grad(model, batch.x_t, batch.t, cot_value, cot_dt)
        return RiskEstimate(loss=loss, grad=grad, stderr=stderr)

    def quadratic_form(self, model, batch):
        """
        Coefficients (c, H) with risk(w) = c.w + w.H.w / 2 for a linear model.

        Only defined for the quadratic generator.
        """
        if self.g.quartic:
            raise LossError("The quartic Bregman risk is not quadratic in the weights")
        c = np.zeros(model.features.count)
        if batch.lam_lo != 0.0:
            c += batch.lam_lo * model.design(batch.x_lo, batch.t_lo).values.mean(axis=0)
        if batch.lam_hi != 0.0:
            c -= batch.lam_hi * model.design(batch.x_hi, batch.t_hi).values.mean(axis=0)
        if batch.x_mid is not None:
            c += batch.lam_mid * (model.design(batch.x_mid, 0.0).values.mean(axis=0)
                                  - model.design(batch.x_mid, LEFT_OF_ZERO).values.mean(axis=0))
        phi = model.design(batch.x_t, batch.t)
        c += np.mean((batch.weight * batch.lam_t)[:, None] * phi.dt
                     + (batch.weight * batch.dlam_t)[:, None] * phi.values, axis=0)
        scale = batch.weight * batch.lam_t
        hessian = (phi.values * scale[:, None]).T @ phi.values / batch.size
        return c, hessian

    def __call__(self, model, rng):
        return self.risk(model, self.draw(rng))


def _objective(sampler, weight_fn, time_dist, g=None, boundary="endpoint"):
    weight_fn = weight_fn or WeightFn("constant", two_sided=sampler.two_sided)
    return TimeScoreObjective(sampler, weight_fn, time_dist, g=g, boundary=boundary)


def tsm_risk(model, sampler, weight_fn, time_dist, batch_size, rng, boundary="endpoint"):
    """One-sided time score matching risk on a fresh batch."""
    if sampler.two_sided:
        raise LossError("tsm_risk expects a one-sided bridge; use two_sided_tsm_risk")
    objective = _objective(sampler, weight_fn, time_dist, boundary=boundary)
    return objective.risk(model, objective.draw(rng, batch_size))


def two_sided_tsm_risk(model, sampler, weight_fn, time_dist, batch_size, rng,
                       boundary="endpoint"):
    """Two-sided (ATE, AME, APE) time score matching risk on a fresh batch."""
    if not sampler.two_sided:
        raise LossError("two_sided_tsm_risk expects a bridge on [-1, 1]")
    objective = _objective(sampler, weight_fn, time_dist, boundary=boundary)
    return objective.risk(model, objective.draw(rng, batch_size))


def bregman_risk(model, sampler, weight_fn, g, time_dist, batch_size, rng, boundary="endpoint"):
    """Bregman divergence risk with generator g on a fresh batch."""
    objective = _objective(sampler, weight_fn, time_dist, g=g, boundary=boundary)
    return objective.risk(model, objective.draw(rng, batch_size))


def oracle_contributions(model, oracle, batch):
    """Per-draw terms weight * lambda * (true score - s)^2."""
    residual = oracle.time_score(batch.x_t, batch.t) - model.eval(batch.x_t, batch.t)
    return batch.weight * batch.lam_t * residual ** 2


def tsm_risk_oracle(model, objective, oracle, batch_size, rng):
    """
    Oracle squared-error risk E_t~q[lambda (d_t log p_t(X_t) - s(X_t, t))^2 / q(t)].

    Draws the same batch as `objective` would from the same stream.
    """
    batch = objective.draw(rng, batch_size)
    return float(oracle_contributions(model, oracle, batch).mean())
