"""
Adaptive moment optimizer with bias correction.
"""

from dataclasses import dataclass, field

import numpy as np


@dataclass
class TrainState:
    """Parameters, step counter, moment accumulators and the loss trace."""

    params: np.ndarray
    step: int = 0
    first_moment: np.ndarray = None
    second_moment: np.ndarray = None
    loss_ema: float = None
    history: list = field(default_factory=list)

    def __post_init__(self):
        self.params = np.array(self.params, dtype=np.float64, copy=True)
        if self.first_moment is None:
            self.first_moment = np.zeros_like(self.params)
        if self.second_moment is None:
            self.second_moment = np.zeros_like(self.params)

    def copy(self):
        return TrainState(self.params.copy(), self.step, self.first_moment.copy(),
                          self.second_moment.copy(), self.loss_ema, list(self.history))


class Adam:
    """
    Adam update rule.

    Args:
        learning_rate: step size
        beta1: decay of the first moment
        beta2: decay of the second moment
        epsilon: denominator offset
    """

    def __init__(self, learning_rate=1e-3, beta1=0.9, beta2=0.999, epsilon=1e-8):
        self.learning_rate = float(learning_rate)
        self.beta1 = beta1
        self.beta2 = beta2
        self.epsilon = epsilon

    def update(self, state, grad):
        """Apply one step to `state` in place."""
        state.step += 1
        state.first_moment = self.beta1 * state.first_moment + (1.0 - self.beta1) * grad
        state.second_moment = self.beta2 * state.second_moment + (1.0 - self.beta2) * grad * grad
        m_hat = state.first_moment / (1.0 - self.beta1 ** state.step)
        v_hat = state.second_moment / (1.0 - self.beta2 ** state.step)
        state.params = state.params - self.learning_rate * m_hat / (np.sqrt(v_hat) + self.epsilon)
        return state
