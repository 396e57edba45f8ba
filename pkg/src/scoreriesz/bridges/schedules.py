"""
Interpolation schedules for bridge random variables.

A schedule gives the coefficient pair (beta1, beta2) of
X_t = beta1(t) * first + beta2(t) * second, with first derivatives.
"""

from dataclasses import dataclass
from enum import Enum

import numpy as np


class BridgeError(Exception):
    """Exception raised for errors in bridge construction or evaluation."""
    pass


class DomainError(BridgeError):
    """Exception raised when a time lies outside the schedule domain."""
    pass


class ScheduleKind(str, Enum):
    LINEAR_ONE_SIDED = "linear-one-sided"
    TWO_SIDED_ABS = "two-sided-abs"
    TWO_SIDED_SQUARE = "two-sided-square"
    AME_SHIFT = "ame-shift"


@dataclass(frozen=True)
class BetaSchedule:
    """
    Coefficient pair of a bridge family.

    Two-sided kinds live on [-1, 1] and use the positive-side endpoint for
    t >= 0; derivatives at t = 0 are the right derivatives.
    """

    kind: ScheduleKind

    @property
    def domain(self):
        if self.kind is ScheduleKind.LINEAR_ONE_SIDED:
            return (0.0, 1.0)
        return (-1.0, 1.0)

    @property
    def two_sided(self):
        return self.domain[0] < 0.0

    def check_domain(self, t):
        """Raise DomainError unless every t lies in the closed domain."""
        t = np.asarray(t, dtype=np.float64)
        lo, hi = self.domain
        if np.any(~np.isfinite(t)) or np.any(t < lo) or np.any(t > hi):
            bad = t[(t < lo) | (t > hi) | ~np.isfinite(t)].ravel()[0]
            raise DomainError(f"t={bad:g} outside schedule domain [{lo:g}, {hi:g}]")
        return t

    def eval(self, t):
        """
        Evaluate the schedule.

        Args:
            t: time or array of times inside the domain

        Returns:
            Tuple (beta1, beta2, dbeta1, dbeta2), each shaped like t
        """
        t = self.check_domain(t)
        kind = self.kind
        if kind is ScheduleKind.LINEAR_ONE_SIDED:
            one = np.ones_like(t)
            return 1.0 - t, t.copy(), -one, one
        if kind is ScheduleKind.TWO_SIDED_ABS:
            side = np.where(t >= 0.0, 1.0, -1.0)
            a = np.abs(t)
            return a, 1.0 - a, side, -side
        if kind is ScheduleKind.TWO_SIDED_SQUARE:
            return t * t, 1.0 - t * t, 2.0 * t, -2.0 * t
        if kind is ScheduleKind.AME_SHIFT:
            return t.copy(), 1.0 - t * t, np.ones_like(t), -2.0 * t
        raise BridgeError(f"Unsupported schedule kind: {kind}")


def create_schedule(kind="linear-one-sided"):
    """Create a schedule from its kind name."""
    try:
        return BetaSchedule(ScheduleKind(kind))
    except ValueError:
        raise BridgeError(f"Unsupported schedule kind: {kind}")
