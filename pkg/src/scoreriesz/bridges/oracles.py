"""
Analytic Gaussian bridge oracles.

When the endpoint laws are Gaussian mixtures, every bridge law p_t is again a
Gaussian mixture: a component pair (j, k) with outer component N(a_j, u_j) and
base component N(b_k, w_k) (diagonal covariances) contributes
N(beta1 * a_j + beta2 * b_k, beta1^2 * u_j + beta2^2 * w_k). The log density and
its time derivative then follow in closed form. These oracles back the tests and
the oracle-nuisance path of the estimators.
"""

import logging
from dataclasses import dataclass

import numpy as np
from scipy.special import logsumexp

from .schedules import BridgeError, ScheduleKind, create_schedule

logger = logging.getLogger(__name__)

LOG_2PI = np.log(2.0 * np.pi)


class DegenerateLawError(BridgeError):
    """Exception raised when a bridge law has a non-positive variance at t."""
    pass


@dataclass(frozen=True)
class GaussianComponent:
    """One diagonal Gaussian mixture component."""

    weight: float
    mean: np.ndarray
    var: np.ndarray


def _component(weight, mean, var, dim=None):
    mean = np.atleast_1d(np.asarray(mean, dtype=np.float64))
    if dim is not None and len(mean) == 1 and dim > 1:
        mean = np.full(dim, mean[0])
    var = np.broadcast_to(np.asarray(var, dtype=np.float64), mean.shape).copy()
    if weight <= 0:
        raise BridgeError(f"Mixture weight must be positive, got {weight}")
    return GaussianComponent(float(weight), mean, var)


class GaussianMixtureBridgeOracle:
    """
    Exact bridge densities for Gaussian-mixture endpoint laws.

    Args:
        schedule: BetaSchedule of the bridge
        outer: components of the law paired with beta1 (p1 for two-sided kinds,
            p0 for the one-sided kind)
        base: components of the law paired with beta2
        outer_negative: components of p-1, two-sided kinds only
    """

    def __init__(self, schedule, outer, base, outer_negative=None):
        if schedule.kind is ScheduleKind.AME_SHIFT:
            raise BridgeError("Use ConditionalGaussianAmeOracle for the AME bridge")
        if schedule.two_sided and outer_negative is None:
            raise BridgeError("Two-sided oracle needs negative-side components")
        self.schedule = schedule
        self.outer = self._normalized(outer)
        self.base = self._normalized(base)
        self.outer_negative = self._normalized(outer_negative) if outer_negative else None
        dims = {len(c.mean) for group in (self.outer, self.base, self.outer_negative or [])
                for c in group}
        if len(dims) != 1:
            raise BridgeError(f"Oracle components disagree on dimension: {sorted(dims)}")
        self.dim = dims.pop()

    @staticmethod
    def _normalized(components):
        total = sum(c.weight for c in components)
        return [GaussianComponent(c.weight / total, c.mean, c.var) for c in components]

    def _pairs(self, outer):
        log_w = np.array([np.log(a.weight * b.weight) for a in outer for b in self.base])
        a_mean = np.array([a.mean for a in outer for _ in self.base])
        a_var = np.array([a.var for a in outer for _ in self.base])
        b_mean = np.array([b.mean for _ in outer for b in self.base])
        b_var = np.array([b.var for _ in outer for b in self.base])
        return log_w, a_mean, a_var, b_mean, b_var

    def _side_terms(self, x, t, outer):
        """Per-pair log weight+density and time derivative for one side."""
        b1, b2, db1, db2 = self.schedule.eval(t)
        log_w, a_mean, a_var, b_mean, b_var = self._pairs(outer)
        # shapes: (B, C, dim)
        b1, b2 = b1[:, None, None], b2[:, None, None]
        db1, db2 = db1[:, None, None], db2[:, None, None]
        mean = b1 * a_mean + b2 * b_mean
        var = b1 ** 2 * a_var + b2 ** 2 * b_var
        if np.any(var <= 0.0):
            bad = t[np.any(var <= 0.0, axis=(1, 2))][0]
            raise DegenerateLawError(f"Bridge law is degenerate at t={bad:g}")
        dmean = db1 * a_mean + db2 * b_mean
        dvar = 2.0 * b1 * db1 * a_var + 2.0 * b2 * db2 * b_var
        resid = x[:, None, :] - mean
        log_comp = log_w - 0.5 * np.sum(resid ** 2 / var + np.log(var) + LOG_2PI, axis=2)
        dlog_comp = np.sum(resid * dmean / var + (resid ** 2 / var - 1.0) * dvar / (2.0 * var),
                           axis=2)
        return log_comp, dlog_comp

    def _terms(self, x, t):
        x = np.atleast_2d(np.asarray(x, dtype=np.float64))
        t = np.broadcast_to(np.asarray(t, dtype=np.float64), (len(x),)).copy()
        self.schedule.check_domain(t)
        if x.shape[1] != self.dim:
            raise BridgeError(f"Expected points of dimension {self.dim}, got {x.shape[1]}")
        log_p = np.empty(len(x))
        score = np.empty(len(x))
        sides = [(t >= 0.0, self.outer)]
        if self.schedule.two_sided:
            sides.append((t < 0.0, self.outer_negative))
        for mask, outer in sides:
            if not np.any(mask):
                continue
            log_comp, dlog_comp = self._side_terms(x[mask], t[mask], outer)
            total = logsumexp(log_comp, axis=1)
            resp = np.exp(log_comp - total[:, None])
            log_p[mask] = total
            score[mask] = np.sum(resp * dlog_comp, axis=1)
        return log_p, score

    def log_density(self, x, t):
        """log p_t(x) for each row of `x`."""
        return self._terms(x, t)[0]

    def time_score(self, x, t):
        """d/dt log p_t(x) at fixed x, for each row of `x`."""
        return self._terms(x, t)[1]

    def endpoint_log_density(self, x, which):
        """log density of an endpoint law: "outer", "base" or "outer_negative"."""
        group = {"outer": self.outer, "base": self.base,
                 "outer_negative": self.outer_negative}[which]
        x = np.atleast_2d(np.asarray(x, dtype=np.float64))
        log_comp = np.stack([
            np.log(c.weight) - 0.5 * np.sum((x - c.mean) ** 2 / c.var + np.log(c.var) + LOG_2PI,
                                            axis=1)
            for c in group], axis=1)
        return logsumexp(log_comp, axis=1)


class ConditionalGaussianAmeOracle:
    """
    Exact AME bridge density for Z ~ N(0, I), D | Z ~ N(c * mean(Z), s2).

    Along X_t = (beta1 + beta2 * D, Z) the treatment coordinate stays Gaussian
    given Z with mean beta1 + beta2 * c * mean(z) and variance beta2^2 * s2; the
    Z marginal does not move, so it drops out of the time score.
    """

    def __init__(self, slope, cond_var, dim_z, schedule=None):
        if cond_var <= 0:
            raise BridgeError(f"Conditional variance must be positive, got {cond_var}")
        self.slope = float(slope)
        self.cond_var = float(cond_var)
        self.dim = int(dim_z) + 1
        self.schedule = schedule or create_schedule(ScheduleKind.AME_SHIFT)

    def _moments(self, x, t):
        x = np.atleast_2d(np.asarray(x, dtype=np.float64))
        t = np.broadcast_to(np.asarray(t, dtype=np.float64), (len(x),))
        b1, b2, db1, db2 = self.schedule.eval(t)
        center = self.slope * x[:, 1:].mean(axis=1) if x.shape[1] > 1 else np.zeros(len(x))
        var = b2 ** 2 * self.cond_var
        if np.any(var <= 0.0):
            raise DegenerateLawError(f"AME bridge law is degenerate at t={t[var <= 0.0][0]:g}")
        return (x, b1 + b2 * center, var, db1 + db2 * center,
                2.0 * b2 * db2 * self.cond_var)

    def log_density(self, x, t):
        x, mean, var, _, _ = self._moments(x, t)
        log_z = -0.5 * np.sum(x[:, 1:] ** 2 + LOG_2PI, axis=1)
        return log_z - 0.5 * ((x[:, 0] - mean) ** 2 / var + np.log(var) + LOG_2PI)

    def time_score(self, x, t):
        x, mean, var, dmean, dvar = self._moments(x, t)
        resid = x[:, 0] - mean
        return resid * dmean / var + (resid ** 2 / var - 1.0) * dvar / (2.0 * var)

    def treatment_score(self, d, z):
        """d/du log p0(u, z) at u = d."""
        z = np.atleast_2d(np.asarray(z, dtype=np.float64))
        center = self.slope * z.mean(axis=1) if z.shape[1] else np.zeros(len(z))
        return -(np.asarray(d, dtype=np.float64) - center) / self.cond_var


def create_gaussian_oracle(mu0, mu1, sigma0=1.0, sigma1=1.0, schedule=None,
                           mu_negative=None, sigma_negative=None):
    """
    Gaussian bridge oracle with isotropic endpoint laws.

    One-sided: p0 = N(mu0, sigma0^2 I) at t = 0, p1 = N(mu1, sigma1^2 I) at t = 1.
    Two-sided: p0 is the base at t = 0, p1 at t = 1 and p-1 = N(mu_negative,
    sigma_negative^2 I) at t = -1.
    """
    schedule = schedule or create_schedule(ScheduleKind.LINEAR_ONE_SIDED)
    mu0 = np.atleast_1d(np.asarray(mu0, dtype=np.float64))
    mu1 = np.atleast_1d(np.asarray(mu1, dtype=np.float64))
    dim = max(len(mu0), len(mu1))
    p0 = [_component(1.0, mu0, sigma0 ** 2, dim)]
    p1 = [_component(1.0, mu1, sigma1 ** 2, dim)]
    if not schedule.two_sided:
        return GaussianMixtureBridgeOracle(schedule, outer=p0, base=p1)
    if mu_negative is None:
        raise BridgeError("Two-sided oracle needs mu_negative")
    sigma_negative = sigma1 if sigma_negative is None else sigma_negative
    p_neg = [_component(1.0, mu_negative, sigma_negative ** 2, dim)]
    return GaussianMixtureBridgeOracle(schedule, outer=p1, base=p0, outer_negative=p_neg)


def create_ate_mixture_oracle(mu, pi, dim_z, schedule=None):
    """
    Two-sided ATE oracle: p1 = N(mu 1, I), p-1 = N(-mu 1, I) and
    p0 = pi * p1 + (1 - pi) * p-1 over covariates.
    """
    schedule = schedule or create_schedule(ScheduleKind.TWO_SIDED_ABS)
    pos = _component(1.0, mu, 1.0, dim_z)
    neg = _component(1.0, -mu, 1.0, dim_z)
    base = [_component(pi, mu, 1.0, dim_z), _component(1.0 - pi, -mu, 1.0, dim_z)]
    return GaussianMixtureBridgeOracle(schedule, outer=[pos], base=base, outer_negative=[neg])


def oracle_time_score(oracle, x, t):
    """
    Exact time score d/dt log p_t(x).

    Raises:
        DegenerateLawError: if the bridge law has v_t <= 0 at t
    """
    scalar = np.ndim(x) <= 1 and np.ndim(t) == 0
    score = oracle.time_score(np.atleast_2d(x), t)
    return float(score[0]) if scalar else score


def telescoped_log_ratio(oracle, x, steps):
    """
    Sum over i = 1..T of log p_{(i-1)/T}(x) - log p_{i/T}(x).

    The sum collapses to log p_0(x) - log p_1(x) for every T; it is computed
    term by term from exact densities.
    """
    steps = int(steps)
    if steps < 1:
        raise BridgeError(f"Number of telescoping steps must be >= 1, got {steps}")
    x = np.atleast_2d(np.asarray(x, dtype=np.float64))
    grid = np.linspace(0.0, 1.0, steps + 1)
    log_p = np.stack([oracle.log_density(x, t) for t in grid])
    total = np.sum(log_p[:-1] - log_p[1:], axis=0)
    return float(total[0]) if len(total) == 1 else total


def adjacent_log_odds(oracle, x, t, dt):
    """
    Bayes log odds log p_{t+dt}(x) - log p_t(x) of the classifier separating two
    adjacent bridge laws; divided by dt it tends to the time score.
    """
    x = np.atleast_2d(np.asarray(x, dtype=np.float64))
    odds = oracle.log_density(x, t + dt) - oracle.log_density(x, t)
    return float(odds[0]) if len(odds) == 1 else odds
