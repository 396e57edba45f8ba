"""
Denoising score matching for the conditional treatment score.

A model s(d~, z, sigma) is fit to the score of the noise-smoothed conditional
law of D given Z. Inputs are laid out as x = (d~, z) with sigma in the time
slot, so the score models of the models package apply unchanged.
"""

import numpy as np
from scipy.special import softmax

from ..models import param_grad
from .tsm import RiskEstimate
from .weights import LossError, SigmaDistribution

# image offsets of the reflection group of [-1, 1] that matter for sigma <= 1
_IMAGE_SHIFTS = np.arange(-2, 3) * 4.0


def reflect_boundary(d):
    """Fold `d` into [-1, 1] by repeated reflection at -1 and 1."""
    folded = np.mod(np.asarray(d, dtype=np.float64) + 1.0, 4.0)
    folded = np.where(folded > 2.0, 4.0 - folded, folded) - 1.0
    return float(folded) if np.ndim(folded) == 0 else folded


def reflected_kernel_score(noisy, clean, sigma):
    """
    d/d(noisy) log K(noisy | clean) for the Gaussian kernel reflected into [-1, 1].

    The reflected kernel is a sum of Gaussians centred at the images
    clean + 4k and 2 - clean + 4k.
    """
    images = np.concatenate([clean[:, None] + _IMAGE_SHIFTS,
                             2.0 - clean[:, None] + _IMAGE_SHIFTS], axis=1)
    resid = noisy[:, None] - images
    resp = softmax(-0.5 * resid ** 2 / sigma[:, None] ** 2, axis=1)
    return -np.sum(resp * resid, axis=1) / sigma ** 2


class DenoisingObjective:
    """
    DSM objective E[lambda(sigma) (s(D + sigma eps, Z, sigma) - target)^2].

    The target is -eps / sigma, or the reflected kernel score when `bounded`.

    Args:
        regressors: observed (d, z) rows
        sigma_dist: SigmaDistribution
        batch_size: draws per call
        bounded: treatment support is [-1, 1]
    """

    def __init__(self, regressors, sigma_dist, batch_size=512, bounded=False):
        regressors = np.atleast_2d(np.asarray(regressors, dtype=np.float64))
        if len(regressors) == 0:
            raise LossError("DSM needs at least one observation")
        self.regressors = regressors
        self.sigma_dist = sigma_dist
        self.batch_size = int(batch_size)
        self.bounded = bool(bounded)

    def draw(self, rng, size=None):
        """Return (x_noisy, sigma, target, weight)."""
        size = self.batch_size if size is None else int(size)
        rows = self.regressors[rng.integers(0, len(self.regressors), size=size)]
        sigma = self.sigma_dist.sample(rng, size)
        if np.any(sigma <= 0.0):
            raise LossError("Noise level must be positive")
        eps = rng.standard_normal(size)
        noisy = rows[:, 0] + sigma * eps
        if self.bounded:
            noisy = reflect_boundary(noisy)
            target = reflected_kernel_score(noisy, rows[:, 0], sigma)
        else:
            target = -eps / sigma
        x = np.column_stack([noisy, rows[:, 1:]])
        return x, sigma, target, SigmaDistribution.weight(sigma)

    def risk(self, model, batch):
        x, sigma, target, weight = batch
        residual = model.eval(x, sigma) - target
        terms = weight * residual ** 2
        grad = param_grad(model, x, sigma, 2.0 * weight * residual / len(sigma))
        return RiskEstimate(loss=float(terms.mean()), grad=grad,
                            stderr=float(terms.std() / np.sqrt(len(terms))))

    def quadratic_form(self, model, batch):
        """Coefficients (c, H) with risk(w) = c.w + w.H.w / 2 + const."""
        x, sigma, target, weight = batch
        phi = model.design(x, sigma).values
        c = -2.0 * np.mean((weight * target)[:, None] * phi, axis=0)
        hessian = 2.0 * (phi * weight[:, None]).T @ phi / len(sigma)
        return c, hessian

    def __call__(self, model, rng):
        return self.risk(model, self.draw(rng))


def dsm_risk(model, dataset, sigma_dist, batch_size, rng, bounded=False):
    """Denoising score matching risk on a fresh batch drawn from `dataset`."""
    if dataset.is_binary:
        raise LossError("Denoising score matching needs a continuous treatment")
    objective = DenoisingObjective(dataset.regressors, sigma_dist, batch_size, bounded)
    return objective.risk(model, objective.draw(rng, batch_size))
