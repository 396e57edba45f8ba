"""
Representer recipes by estimation method name.

A recipe maps (train split, RunConfig, rng, options) to a fitted representer.
"""

from ..riesz import (
    ame_bridge_representer,
    ame_dsm_representer,
    ape_representer,
    ate_representer,
)
from .baseline import riesz_regression_baseline
from .functionals import Functional
from .outcome import EstimationError


def _ate_tsm(train, cfg, rng, options):
    return ate_representer(train, cfg, rng, logistic=False)


def _ate_logistic(train, cfg, rng, options):
    return ate_representer(train, cfg, rng, logistic=True)


def _ame_bridge(train, cfg, rng, options):
    return ame_bridge_representer(train, cfg, rng)


def _ame_dsm(train, cfg, rng, options):
    return ame_dsm_representer(train, cfg, rng, bounded=bool(options.get("bounded", False)))


def _ape_tsm(train, cfg, rng, options):
    return ape_representer(train, cfg, rng, shift=float(options.get("policy_shift", 1.0)))


def _ate_lsif(train, cfg, rng, options):
    return riesz_regression_baseline(train, Functional.ATE, cfg.feature_degree, cfg.ridge)


def _ame_lsif(train, cfg, rng, options):
    return riesz_regression_baseline(train, Functional.AME, cfg.feature_degree, cfg.ridge)


RECIPES = {
    "ate-tsm": (Functional.ATE, _ate_tsm),
    "ate-logistic": (Functional.ATE, _ate_logistic),
    "ame-bridge": (Functional.AME, _ame_bridge),
    "ame-dsm": (Functional.AME, _ame_dsm),
    "ape-tsm": (Functional.APE, _ape_tsm),
    "ate-lsif": (Functional.ATE, _ate_lsif),
    "ame-lsif": (Functional.AME, _ame_lsif),
}

METHODS = tuple(RECIPES)


def get_recipe(method):
    """Return (functional, recipe) for a method name."""
    try:
        return RECIPES[method]
    except KeyError:
        raise EstimationError(
            f"Unknown method '{method}'; expected one of {', '.join(METHODS)}")
