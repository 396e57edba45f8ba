"""
Training module for fitting score models.

This module contains the Adam optimizer, the minibatch training loop with its
loss trace, and the closed-form fit for linear score models.
"""

from .optimizer import (
    Adam,
    TrainState
)

from .trainer import (
    TrainingError,
    SingularSystemError,
    TrainResult,
    train,
    closed_form_fit,
    fit_score_model,
    write_history
)

__all__ = [
    "Adam",
    "TrainState",
    "TrainingError",
    "SingularSystemError",
    "TrainResult",
    "train",
    "closed_form_fit",
    "fit_score_model",
    "write_history"
]
