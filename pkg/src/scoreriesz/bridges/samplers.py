"""
Bridge samplers.

A bridge sample is X_t = beta1(t) * first + beta2(t) * second, where the two
endpoint draws are independent (p_t is the pushforward of the product law).
For two-sided schedules the `first` draw comes from the positive-side source
when t >= 0 and from the negative-side source when t < 0. The AME bridge
shifts the treatment coordinate only: X_t = (beta1 + beta2 * d, z).
"""

import logging
from dataclasses import dataclass

import numpy as np

from .schedules import BridgeError, ScheduleKind, create_schedule

logger = logging.getLogger(__name__)


class EmpiricalSource:
    """Resamples rows of a fixed sample with replacement."""

    def __init__(self, samples, name="empirical"):
        samples = np.asarray(samples, dtype=np.float64)
        if samples.ndim == 1:
            samples = samples.reshape(-1, 1)
        if len(samples) == 0:
            raise BridgeError(f"Endpoint source '{name}' has no samples")
        self.samples = samples
        self.name = name

    @property
    def dim(self):
        return self.samples.shape[1]

    def draw(self, rng, size):
        return self.samples[rng.integers(0, len(self.samples), size=size)]


class GaussianSource:
    """Isotropic Gaussian endpoint law N(mean, sd^2 I)."""

    def __init__(self, mean, sd, name="gaussian"):
        self.mean = np.atleast_1d(np.asarray(mean, dtype=np.float64))
        self.sd = float(sd)
        self.name = name

    @property
    def dim(self):
        return len(self.mean)

    def draw(self, rng, size):
        return self.mean + self.sd * rng.standard_normal((size, self.dim))


class PolicySource:
    """Applies a policy map to resampled rows of the observed regressors."""

    def __init__(self, samples, policy, name="policy"):
        self.base = EmpiricalSource(samples, name=name)
        self.policy = policy
        self.name = name

    @property
    def dim(self):
        return self.base.dim

    def draw(self, rng, size):
        return np.asarray(self.policy(self.base.draw(rng, size)), dtype=np.float64)


class ShiftPolicy:
    """Shifts the treatment coordinate (column 0) of X = (D, Z) by `delta`."""

    def __init__(self, delta):
        self.delta = float(delta)

    def __call__(self, x):
        shifted = np.array(x, dtype=np.float64, copy=True)
        shifted[:, 0] += self.delta
        return shifted


@dataclass(frozen=True)
class EndpointPair:
    """Endpoint draws feeding X_t = beta1 * first + beta2 * second."""

    first: np.ndarray
    second: np.ndarray

    def path(self, schedule, t):
        """Return (X_t, dX_t/dt) for this pair along `schedule`."""
        b1, b2, db1, db2 = schedule.eval(t)
        b1, b2 = b1[..., None], b2[..., None]
        db1, db2 = db1[..., None], db2[..., None]
        return b1 * self.first + b2 * self.second, db1 * self.first + db2 * self.second


@dataclass(frozen=True)
class AmeContext:
    """Observed (d, z) feeding the AME bridge X_t = (beta1 + beta2 * d, z)."""

    d: np.ndarray
    z: np.ndarray

    def path(self, schedule, t):
        b1, b2, db1, db2 = schedule.eval(t)
        d_t = b1 + b2 * self.d
        x_t = np.column_stack([d_t, self.z])
        velocity = np.zeros_like(x_t)
        velocity[:, 0] = db1 + db2 * self.d
        return x_t, velocity


class BridgeSampler:
    """
    Draws bridge samples for one-sided, two-sided and AME schedules.

    Args:
        schedule: BetaSchedule
        first: source paired with beta1 (p0 for one-sided, p1 for two-sided)
        second: source paired with beta2 (p1 for one-sided, p0 for two-sided)
        first_negative: negative-side source for two-sided schedules
        rows: observed (d, z) rows for the AME schedule
    """

    def __init__(self, schedule, first=None, second=None, first_negative=None, rows=None):
        self.schedule = schedule
        self.first = first
        self.second = second
        self.first_negative = first_negative
        self.rows = rows
        self._validate()

    def _validate(self):
        kind = self.schedule.kind
        if kind is ScheduleKind.AME_SHIFT:
            if self.rows is None:
                raise BridgeError("The AME bridge needs observed (d, z) rows")
            return
        if self.first is None or self.second is None:
            raise BridgeError("Bridge needs both endpoint sources")
        if self.schedule.two_sided and self.first_negative is None:
            raise BridgeError("Two-sided bridge needs a negative-side source")
        dims = {s.dim for s in (self.first, self.second, self.first_negative) if s is not None}
        if len(dims) != 1:
            raise BridgeError(f"Endpoint sources disagree on dimension: {sorted(dims)}")

    @property
    def domain(self):
        return self.schedule.domain

    @property
    def two_sided(self):
        return self.schedule.two_sided

    @property
    def dim(self):
        if self.rows is not None:
            return self.rows.dim
        return self.first.dim

    def draw_context(self, t, rng):
        """Draw the endpoint context for each time in `t`."""
        t = self.schedule.check_domain(np.atleast_1d(t))
        size = len(t)
        if self.schedule.kind is ScheduleKind.AME_SHIFT:
            rows = self.rows.draw(rng, size)
            return AmeContext(d=rows[:, 0], z=rows[:, 1:])
        first = self.first.draw(rng, size)
        if self.two_sided:
            negative = self.first_negative.draw(rng, size)
            first = np.where((t >= 0.0)[:, None], first, negative)
        second = self.second.draw(rng, size)
        return EndpointPair(first=first, second=second)

    def draw(self, t, rng):
        """
        Draw bridge samples at times `t`.

        Returns:
            Tuple (x_t, velocity, context) with x_t and velocity of shape (B, dim)
        """
        t = np.atleast_1d(np.asarray(t, dtype=np.float64))
        context = self.draw_context(t, rng)
        x_t, velocity = context.path(self.schedule, t)
        return x_t, velocity, context

    def draw_endpoint(self, side, size, rng):
        """Draw endpoint samples for the boundary at `side` (a domain end)."""
        t = np.full(size, float(side))
        x_t, _, _ = self.draw(t, rng)
        return x_t


def sample_bridge(sampler, t, rng):
    """
    Draw one bridge point per time in `t`.

    Raises:
        DomainError: if t lies outside the schedule domain
    """
    scalar = np.ndim(t) == 0
    x_t, _, _ = sampler.draw(t, rng)
    return x_t[0] if scalar else x_t


def sample_ame_bridge(d, z, t, schedule=None):
    """
    AME bridge point (beta1(t) + beta2(t) * d, z).

    Args:
        d: treatment value(s)
        z: covariate vector(s); passed through unchanged
        t: time in [-1, 1]
        schedule: AME schedule, default beta1 = t, beta2 = 1 - t^2
    """
    schedule = schedule or create_schedule(ScheduleKind.AME_SHIFT)
    b1, b2, _, _ = schedule.eval(t)
    d_t = b1 + b2 * np.asarray(d, dtype=np.float64)
    z = np.asarray(z, dtype=np.float64)
    if np.ndim(d_t) == 0:
        return np.concatenate([[float(d_t)], np.atleast_1d(z)])
    return np.column_stack([d_t, z.reshape(len(d_t), -1)])


def create_one_sided_sampler(p0_samples, p1_samples, schedule=None):
    """Bridge from p0 (t = 0) to p1 (t = 1) using empirical samples."""
    schedule = schedule or create_schedule(ScheduleKind.LINEAR_ONE_SIDED)
    return BridgeSampler(schedule,
                         first=EmpiricalSource(p0_samples, "p0"),
                         second=EmpiricalSource(p1_samples, "p1"))


def create_ate_sampler(dataset, schedule=None):
    """
    Two-sided ATE bridge over covariates: p1 and p-1 are the treated and control
    arms, p0 is the full covariate sample.
    """
    schedule = schedule or create_schedule(ScheduleKind.TWO_SIDED_ABS)
    if dataset.dim_z == 0:
        raise BridgeError("The ATE bridge needs at least one covariate")
    treated, control = dataset.arm(1.0), dataset.arm(-1.0)
    logger.debug("ATE bridge arms: %d treated, %d control", len(treated), len(control))
    return BridgeSampler(schedule,
                         first=EmpiricalSource(treated, "p1"),
                         first_negative=EmpiricalSource(control, "p-1"),
                         second=EmpiricalSource(dataset.covariates, "p0"))


def create_ape_sampler(dataset, policy_positive, policy_negative, schedule=None):
    """Two-sided APE bridge over regressors X = (D, Z) with policy endpoints."""
    schedule = schedule or create_schedule(ScheduleKind.TWO_SIDED_ABS)
    x = dataset.regressors
    return BridgeSampler(schedule,
                         first=PolicySource(x, policy_positive, "p1"),
                         first_negative=PolicySource(x, policy_negative, "p-1"),
                         second=EmpiricalSource(x, "p0"))


def create_ame_sampler(dataset, schedule=None):
    """AME bridge over observed (d, z) rows."""
    schedule = schedule or create_schedule(ScheduleKind.AME_SHIFT)
    if schedule.kind is not ScheduleKind.AME_SHIFT:
        raise BridgeError(f"The AME bridge needs an AME schedule, got {schedule.kind.value}")
    return BridgeSampler(schedule, rows=EmpiricalSource(dataset.regressors, "rows"))
