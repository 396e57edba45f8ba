"""
Model construction and JSON checkpoints.

A checkpoint holds the model kind, its feature or layer layout and the flat
parameter vector.
"""

import json
import logging

from .base import ScoreModelError
from .features import PolynomialTimeFeatures, create_rbf_features
from .linear import LinearScoreModel
from .mlp import MlpScoreModel

logger = logging.getLogger(__name__)

MODEL_CLASSES = {
    LinearScoreModel.kind: LinearScoreModel,
    MlpScoreModel.kind: MlpScoreModel,
}


def create_score_model(dim, cfg, rng, two_sided=False, samples=None, rbf_centers=0):
    """
    Build an untrained score model from a RunConfig.

    Args:
        dim: dimension of x
        cfg: RunConfig (model, feature_degree, hidden)
        rng: Generator for MLP initialization and RBF center draws
        two_sided: split linear features at t = 0
        samples: points to draw RBF centers from
        rbf_centers: number of RBF centers; 0 selects polynomial features
    """
    if cfg.model == "mlp":
        return MlpScoreModel(dim, cfg.hidden, rng=rng)
    if cfg.model != "linear":
        raise ScoreModelError(f"Unsupported model type: {cfg.model}")
    if rbf_centers and samples is not None:
        features = create_rbf_features(samples, rbf_centers, rng,
                                       t_degree=cfg.feature_degree, split_at_zero=two_sided)
    else:
        features = PolynomialTimeFeatures(dim, cfg.feature_degree, split_at_zero=two_sided)
    logger.debug("Created %s features with %d basis functions", features.kind, features.count)
    return LinearScoreModel(features)


def save_model(model, path):
    """Write a model checkpoint as JSON."""
    try:
        with open(path, "w", encoding="utf-8") as handle:
            json.dump(model.to_dict(), handle)
    except OSError as e:
        raise ScoreModelError(f"Failed to write checkpoint {path}: {e}") from e


def load_model(path):
    """Read a model checkpoint written by save_model."""
    try:
        with open(path, "r", encoding="utf-8") as handle:
            data = json.load(handle)
    except (OSError, json.JSONDecodeError) as e:
        raise ScoreModelError(f"Failed to read checkpoint {path}: {e}") from e
    model_class = MODEL_CLASSES.get(data.get("kind"))
    if model_class is None:
        raise ScoreModelError(f"Unknown model kind in checkpoint: {data.get('kind')}")
    try:
        return model_class.from_dict(data)
    except (KeyError, ValueError) as e:
        raise ScoreModelError(f"Failed to restore checkpoint {path}: {e}") from e
