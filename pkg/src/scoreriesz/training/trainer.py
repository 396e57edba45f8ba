"""
Minibatch training and the closed-form fit for linear score models.

A loss is any callable loss(model, rng) returning a RiskEstimate; the
objectives of the losses package qualify.
"""

import json
import logging
from dataclasses import dataclass

import numpy as np
from scipy import linalg

from ..models import ScoreModelError
from .optimizer import Adam, TrainState

logger = logging.getLogger(__name__)

HISTORY_EVERY = 100
EMA_DECAY = 0.9


class TrainingError(Exception):
    """Exception raised when training diverges."""

    def __init__(self, message, step=None):
        super().__init__(message)
        self.step = step


class SingularSystemError(TrainingError):
    """Exception raised when the regularized normal equations cannot be solved."""
    pass


@dataclass(frozen=True)
class TrainResult:
    """Trained model, loss trace [{step, loss_ema}] and the final learning rate."""

    model: object
    history: list
    learning_rate: float


def _evaluate(loss, model, rng):
    try:
        estimate = loss(model, rng)
    except ScoreModelError:
        return None
    if not (np.isfinite(estimate.loss) and np.all(np.isfinite(estimate.grad))):
        return None
    return estimate


def train(loss, model, cfg, rng):
    """
    Run cfg.steps Adam steps on `loss`.

    On the first non-finite loss, gradient or parameter vector the step is
    discarded and the learning rate halved; a second one aborts.

    Args:
        loss: callable (model, rng) -> RiskEstimate
        model: initial score model
        cfg: RunConfig (steps, learning_rate)
        rng: numpy Generator for minibatch draws

    Returns:
        TrainResult

    Raises:
        TrainingError: with the failing step index
    """
    optimizer = Adam(cfg.learning_rate)
    state = TrainState(model.params)
    retried = False

    while state.step < cfg.steps:
        step = state.step + 1
        current = model.with_params(state.params)
        estimate = _evaluate(loss, current, rng)
        candidate = None
        if estimate is not None:
            candidate = optimizer.update(state.copy(), estimate.grad)
            if not np.all(np.isfinite(candidate.params)):
                candidate = None

        if candidate is None:
            if retried:
                raise TrainingError(f"Training diverged at step {step}", step=step)
            retried = True
            optimizer.learning_rate /= 2.0
            logger.warning("Non-finite loss at step %d; halving learning rate to %g",
                           step, optimizer.learning_rate)
            continue

        loss_value = float(estimate.loss)
        if candidate.loss_ema is None:
            candidate.loss_ema = loss_value
        else:
            candidate.loss_ema = EMA_DECAY * candidate.loss_ema + (1.0 - EMA_DECAY) * loss_value
        if step % HISTORY_EVERY == 0 or step == cfg.steps:
            candidate.history.append({"step": step, "loss_ema": candidate.loss_ema})
            logger.debug("step %d loss_ema %.6g", step, candidate.loss_ema)
        state = candidate

    logger.info("Training finished after %d steps, loss_ema=%s", state.step, state.loss_ema)
    return TrainResult(model=model.with_params(state.params), history=state.history,
                       learning_rate=optimizer.learning_rate)


def closed_form_fit(objective, model, ridge, rng, batch_size):
    """
    Exact minimizer of the empirical quadratic risk plus ridge * |w|^2.

    Args:
        objective: object with draw(rng, size) and quadratic_form(model, batch)
        model: LinearScoreModel supplying the features
        ridge: regularization tau >= 0
        rng: numpy Generator
        batch_size: Monte Carlo draws defining the empirical risk

    Returns:
        LinearScoreModel with the fitted weights

    Raises:
        SingularSystemError: if the regularized system is singular
    """
    if not hasattr(model, "features"):
        raise TrainingError("closed_form_fit needs a linear score model")
    batch = objective.draw(rng, batch_size)
    c, hessian = objective.quadratic_form(model, batch)
    system = hessian + 2.0 * ridge * np.eye(len(c))
    try:
        weights = linalg.solve(system, -c, assume_a="sym")
    except (linalg.LinAlgError, ValueError) as e:
        raise SingularSystemError(f"Failed to solve the normal equations: {e}") from e
    if not np.all(np.isfinite(weights)):
        raise SingularSystemError("Normal equations produced non-finite weights")
    logger.info("Closed-form fit: %d weights from %d draws", len(weights), batch_size)
    return model.with_params(weights)


def fit_score_model(objective, model, cfg, rng):
    """
    Fit by the configured solver. The closed form applies to linear models
    under quadratic risks; anything else falls back to Adam.
    """
    generator = getattr(objective, "g", None)
    quadratic = generator is None or not generator.quartic
    if cfg.solver == "closed_form" and hasattr(model, "features") and quadratic:
        return closed_form_fit(objective, model, cfg.ridge, rng, cfg.fit_batch)
    return train(objective, model, cfg, rng).model


def write_history(history, path):
    """Write a loss trace as JSON lines {step, loss_ema}."""
    try:
        with open(path, "w", encoding="utf-8") as handle:
            for record in history:
                handle.write(json.dumps({"step": int(record["step"]),
                                         "loss_ema": float(record["loss_ema"])}) + "\n")
    except OSError as e:
        raise TrainingError(f"Failed to write history {path}: {e}") from e
