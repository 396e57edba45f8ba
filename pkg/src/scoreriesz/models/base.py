"""
Derivative queries shared by all score models.

Every model exposes eval, time_partial, grad_x, jet (value and t-partial),
vjp (parameter gradient against value/t-partial cotangents), params and
with_params. Models are immutable; training swaps in new parameter vectors.
"""

import numpy as np


class ScoreModelError(Exception):
    """Exception raised for invalid score models or derivative queries."""
    pass


class CallableScoreModel:
    """
    Wraps a plain function s(x, t) as a score model.

    Used to feed analytic oracle scores through the representer code. Only
    evaluation is supported.
    """

    kind = "callable"

    def __init__(self, fn, dim):
        self.fn = fn
        self.dim = int(dim)

    def eval(self, x, t):
        x = np.asarray(x, dtype=np.float64).reshape(-1, self.dim)
        t = np.broadcast_to(np.asarray(t, dtype=np.float64), (len(x),))
        return np.asarray(self.fn(x, t), dtype=np.float64)


def total_time_derivative(model, context, schedule, t):
    """
    d/dt s(X_t, t) along the bridge through the endpoint context.

    Args:
        model: score model
        context: EndpointPair or AmeContext, one row per time
        schedule: BetaSchedule that maps the context to X_t
        t: times, shape (B,)

    Returns:
        d_t s(X_t, t) + (dX_t/dt) . grad_x s(X_t, t), shape (B,)
    """
    t = np.atleast_1d(np.asarray(t, dtype=np.float64))
    x_t, velocity = context.path(schedule, t)
    return model.time_partial(x_t, t) + np.sum(velocity * model.grad_x(x_t, t), axis=1)


def param_grad(model, x, t, cot_value, cot_dt=None):
    """
    Parameter gradient of sum_i cot_value_i * s(x_i, t_i) + cot_dt_i * d_t s(x_i, t_i).

    A loss built from s and its t-partial hands in its partial derivatives
    with respect to those two quantities as cotangents.

    Raises:
        ScoreModelError: if the gradient is not finite
    """
    cot_value = np.asarray(cot_value, dtype=np.float64)
    if cot_value.size == 0:
        return np.zeros_like(model.params)
    grad = model.vjp(x, t, cot_value, cot_dt)
    if not np.all(np.isfinite(grad)):
        raise ScoreModelError("Parameter gradient is not finite")
    return grad
