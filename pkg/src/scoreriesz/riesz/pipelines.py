"""
Recipes that train a score model on a training split and return its representer.

Each recipe reads every knob from a RunConfig and draws all randomness from
the given stream, so a fold replays exactly for a fixed seed.
"""

import logging

from ..bridges import (
    ShiftPolicy,
    create_ame_sampler,
    create_ape_sampler,
    create_ate_sampler,
)
from ..losses import (
    BregmanG,
    DenoisingObjective,
    SigmaDistribution,
    TimeDistribution,
    TimeScoreObjective,
    WeightFn,
    create_time_distribution,
)
from ..models import create_score_model
from ..training import fit_score_model
from .quadrature import Quadrature, RieszError
from .representers import (
    riesz_ame_bridge,
    riesz_ame_dsm,
    riesz_ape,
    riesz_ate_direct,
    riesz_ate_logistic,
)

logger = logging.getLogger(__name__)


def _two_sided_objective(sampler, cfg, time_dist=None, boundary=None):
    return TimeScoreObjective(
        sampler,
        weight_fn=WeightFn(cfg.lambda_kind.value, two_sided=True),
        time_dist=time_dist or create_time_distribution(sampler.domain, cfg.t_truncation),
        g=BregmanG(cfg.bregman),
        boundary=boundary or cfg.boundary,
        batch_size=cfg.batch_size,
    )


def _window_quadrature(objective, cfg):
    window = (objective.time_dist.low, objective.time_dist.high)
    return Quadrature(cfg.quadrature_points, window=window)


def fit_ate_score(train, cfg, rng):
    """Fit a two-sided time score over covariates on the ATE bridge."""
    if not train.is_binary:
        raise RieszError("The ATE bridge needs a binary treatment")
    objective = _two_sided_objective(create_ate_sampler(train), cfg)
    model = create_score_model(train.dim_z, cfg, rng, two_sided=True)
    return fit_score_model(objective, model, cfg, rng), _window_quadrature(objective, cfg)


def ate_representer(train, cfg, rng, logistic=False):
    model, quad = fit_ate_score(train, cfg, rng)
    pi_hat = train.treated_share()
    if logistic:
        return riesz_ate_logistic(model, pi_hat, quad)
    return riesz_ate_direct(model, pi_hat, quad)


def ame_bridge_representer(train, cfg, rng):
    """
    AME bridge score on the window [-w, w] around t = 0, boundary terms at the
    window ends; only the value at t = 0 is used.
    """
    if train.is_binary:
        raise RieszError("The AME bridge needs a continuous treatment")
    w = cfg.ame_half_width
    objective = _two_sided_objective(create_ame_sampler(train), cfg,
                                     time_dist=TimeDistribution(-w, w), boundary="truncated")
    model = create_score_model(1 + train.dim_z, cfg, rng)
    return riesz_ame_bridge(fit_score_model(objective, model, cfg, rng))


def ame_dsm_representer(train, cfg, rng, bounded=False):
    """Denoising score with sigma in the time slot, read at sigma_min."""
    if train.is_binary:
        raise RieszError("Denoising score matching needs a continuous treatment")
    objective = DenoisingObjective(train.regressors,
                                   SigmaDistribution(cfg.sigma_min, cfg.sigma_max),
                                   batch_size=cfg.batch_size, bounded=bounded)
    model = create_score_model(1 + train.dim_z, cfg, rng)
    return riesz_ame_dsm(fit_score_model(objective, model, cfg, rng), cfg.sigma_min)


def ape_representer(train, cfg, rng, shift=1.0):
    """APE score over X = (D, Z) for the policies that shift D by +shift and -shift."""
    if train.is_binary:
        raise RieszError("Shift policies need a continuous treatment")
    sampler = create_ape_sampler(train, ShiftPolicy(shift), ShiftPolicy(-shift))
    objective = _two_sided_objective(sampler, cfg)
    model = create_score_model(1 + train.dim_z, cfg, rng, two_sided=True)
    fitted = fit_score_model(objective, model, cfg, rng)
    return riesz_ape(fitted, _window_quadrature(objective, cfg))
