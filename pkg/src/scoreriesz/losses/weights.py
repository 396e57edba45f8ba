"""
Weighting functions, reference densities and convex generators used by the risks.
"""

from dataclasses import dataclass

import numpy as np


class LossError(Exception):
    """Exception raised for invalid risk settings or batches."""
    pass


class ImportanceWeightError(LossError):
    """Exception raised when a sampled time has zero reference density."""
    pass


@dataclass(frozen=True)
class WeightFn:
    """
    Time weighting lambda(t) with its derivative.

    "constant" is lambda = 1. "endpoint-vanishing" is 1 - t^2 on [-1, 1] and
    t (1 - t) on [0, 1], so both vanish at the domain ends.
    """

    kind: str = "constant"
    two_sided: bool = False

    def __post_init__(self):
        if self.kind not in ("constant", "endpoint-vanishing"):
            raise LossError(f"Unknown weighting function: {self.kind}")

    def __call__(self, t):
        t = np.asarray(t, dtype=np.float64)
        if self.kind == "constant":
            return np.ones_like(t)
        if self.two_sided:
            return 1.0 - t * t
        return t * (1.0 - t)

    def derivative(self, t):
        t = np.asarray(t, dtype=np.float64)
        if self.kind == "constant":
            return np.zeros_like(t)
        if self.two_sided:
            return -2.0 * t
        return 1.0 - 2.0 * t


@dataclass(frozen=True)
class TimeDistribution:
    """Uniform reference density q on [low, high]."""

    low: float
    high: float

    def __post_init__(self):
        if not self.high > self.low:
            raise LossError(f"Empty time interval [{self.low}, {self.high}]")

    def density(self, t):
        t = np.asarray(t, dtype=np.float64)
        inside = (t >= self.low) & (t <= self.high)
        return np.where(inside, 1.0 / (self.high - self.low), 0.0)

    def sample(self, rng, size):
        return rng.uniform(self.low, self.high, size=size)


def create_time_distribution(domain, truncation):
    """Uniform q on the domain shrunk by `truncation` at both ends."""
    low, high = domain
    return TimeDistribution(low + truncation, high - truncation)


@dataclass(frozen=True)
class BregmanG:
    """
    Strictly convex generator g with derivatives up to third order.

    "quadratic" is a^2 / 2 and recovers time score matching; "quartic" is
    a^2 / 2 + a^4 / 4.
    """

    kind: str = "quadratic"

    def __post_init__(self):
        if self.kind not in ("quadratic", "quartic"):
            raise LossError(f"Unknown Bregman generator: {self.kind}")

    @property
    def quartic(self):
        return self.kind == "quartic"

    def g(self, a):
        return 0.5 * a * a + (0.25 * a ** 4 if self.quartic else 0.0)

    def g1(self, a):
        return a + (a ** 3 if self.quartic else 0.0)

    def g2(self, a):
        return 1.0 + (3.0 * a * a if self.quartic else 0.0 * a)

    def g3(self, a):
        return 6.0 * a if self.quartic else 0.0 * a


@dataclass(frozen=True)
class SigmaDistribution:
    """Log-uniform noise level on [low, high]; a point mass when low == high."""

    low: float
    high: float

    def __post_init__(self):
        if not (self.low > 0 and self.high >= self.low):
            raise LossError(f"Invalid noise range [{self.low}, {self.high}]")

    def sample(self, rng, size):
        if self.high == self.low:
            return np.full(size, self.low)
        return np.exp(rng.uniform(np.log(self.low), np.log(self.high), size=size))

    @staticmethod
    def weight(sigma):
        """lambda(sigma) = sigma^2."""
        return np.asarray(sigma, dtype=np.float64) ** 2
