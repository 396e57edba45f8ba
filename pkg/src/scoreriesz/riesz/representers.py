"""
Riesz representers from trained score models.

ATE and APE representers exponentiate integrated time scores; the AME
representer reads the AME bridge score at t = 0 or the denoising score at the
smallest noise level. One AME score also yields the APE representer for the
policies that set D to +1 or -1, by integrating it along the treatment axis.
"""

import logging
from dataclasses import dataclass, field
from enum import Enum

import numpy as np
import pandas as pd
from scipy.special import expit, logit

from .quadrature import RieszError, integrate_along_treatment, integrate_time_score

logger = logging.getLogger(__name__)

PROPENSITY_CLIP = 1e-6
# exp overflows float64 beyond this
MAX_EXPONENT = 700.0
# Richardson error above which a log ratio is flagged
QUADRATURE_TOLERANCE = 1e-3


class DegenerateArmError(RieszError):
    """Exception raised when a treatment arm is empty."""
    pass


class RieszOverflowError(RieszError):
    """Exception raised when an exponentiated log ratio overflows."""
    pass


class RieszMethod(str, Enum):
    ATE_DIRECT = "AteDirect"
    ATE_LOGISTIC = "AteLogistic"
    AME_BRIDGE = "AmeBridge"
    AME_DSM = "AmeDsm"
    APE_EXP = "ApeExp"
    APE_FROM_AME = "ApeFromAme"
    BASELINE = "Baseline"


@dataclass
class RieszEstimate:
    """
    Estimated representer alpha(d, z) with its provenance.

    `warnings` counts events such as propensity clipping across evaluations.
    """

    fn: object
    method: RieszMethod
    provenance: dict = field(default_factory=dict)
    warnings: dict = field(default_factory=dict)

    def __call__(self, d, z):
        d = np.atleast_1d(np.asarray(d, dtype=np.float64))
        z = np.asarray(z, dtype=np.float64).reshape(len(d), -1)
        return np.asarray(self.fn(d, z), dtype=np.float64)

    def count(self, name, amount):
        if amount:
            self.warnings[name] = self.warnings.get(name, 0) + int(amount)


def _safe_exp(log_value, what):
    log_value = np.asarray(log_value, dtype=np.float64)
    if np.any(log_value > MAX_EXPONENT):
        worst = float(np.max(log_value))
        raise RieszOverflowError(f"Overflow exponentiating {what}: integral value {worst:g}")
    return np.exp(log_value)


def _integrate(model, x, a, b, quad, estimate):
    values, errors = integrate_time_score(model, x, a, b, quad, with_error=True)
    flagged = int(np.sum(errors > QUADRATURE_TOLERANCE))
    if flagged:
        logger.warning("Quadrature error above %g for %d of %d points on [%g, %g]",
                       QUADRATURE_TOLERANCE, flagged, len(errors), min(a, b), max(a, b))
        estimate.count("quadrature_error", flagged)
    return values


def _check_share(pi_hat):
    if not 0.0 < pi_hat < 1.0:
        raise DegenerateArmError(f"Treated share {pi_hat:g} leaves an arm empty")


def riesz_ate_direct(model, pi_hat, quad):
    """
    alpha(d, z) = 1[d = 1] p0(z) / (pi p1(z)) - 1[d = -1] p0(z) / ((1 - pi) p-1(z)),
    with p0 / p1 = exp(-int_0^1 s dt) and p0 / p-1 = exp(int_-1^0 s dt).
    """
    _check_share(pi_hat)
    estimate = RieszEstimate(None, RieszMethod.ATE_DIRECT,
                             {"pi_hat": pi_hat, "quadrature_points": quad.points})

    def alpha(d, z):
        out = np.zeros(len(d))
        treated, control = d == 1.0, d == -1.0
        if np.any(treated):
            log_ratio = -_integrate(model, z[treated], 0.0, 1.0, quad, estimate)
            out[treated] = _safe_exp(log_ratio, "log p0/p1") / pi_hat
        if np.any(control):
            log_ratio = _integrate(model, z[control], -1.0, 0.0, quad, estimate)
            out[control] = -_safe_exp(log_ratio, "log p0/p-1") / (1.0 - pi_hat)
        return out

    estimate.fn = alpha
    return estimate


def logistic_propensity(model, pi_hat, quad, z, estimate=None):
    """
    e(z) = expit(int_-1^1 s(z, t) dt + log(pi / (1 - pi))), unclipped.

    The integral is log p1(z) - log p-1(z). Quadrature warnings are counted on
    `estimate` when given.
    """
    _check_share(pi_hat)
    z = np.atleast_2d(np.asarray(z, dtype=np.float64))
    if estimate is None:
        estimate = RieszEstimate(None, RieszMethod.ATE_LOGISTIC)
    upper = _integrate(model, z, 0.0, 1.0, quad, estimate)
    lower = _integrate(model, z, -1.0, 0.0, quad, estimate)
    return expit(upper + lower + logit(pi_hat))


def riesz_ate_logistic(model, pi_hat, quad):
    """
    alpha(d, z) = 1[d = 1] / e(z) - 1[d = -1] / (1 - e(z)), with e from the
    logistic form clipped to [1e-6, 1 - 1e-6].
    """
    _check_share(pi_hat)
    estimate = RieszEstimate(None, RieszMethod.ATE_LOGISTIC,
                             {"pi_hat": pi_hat, "quadrature_points": quad.points})

    def alpha(d, z):
        e = logistic_propensity(model, pi_hat, quad, z, estimate)
        clipped = np.clip(e, PROPENSITY_CLIP, 1.0 - PROPENSITY_CLIP)
        n_clipped = int(np.sum(clipped != e))
        if n_clipped:
            logger.warning("Clipped %d propensities to [%g, %g]", n_clipped,
                           PROPENSITY_CLIP, 1.0 - PROPENSITY_CLIP)
            estimate.count("propensity_clipped", n_clipped)
        return np.where(d == 1.0, 1.0 / clipped, 0.0) - np.where(d == -1.0, 1.0 / (1.0 - clipped), 0.0)

    estimate.fn = alpha
    return estimate


def riesz_ame_bridge(model):
    """alpha(d, z) = s((d, z), 0) for a score trained on the AME bridge."""
    def alpha(d, z):
        return model.eval(np.column_stack([d, z]), 0.0)

    return RieszEstimate(alpha, RieszMethod.AME_BRIDGE)


def riesz_ame_dsm(model, sigma_min):
    """alpha(d, z) = -s(d, z, sigma_min) for a denoising score."""
    def alpha(d, z):
        return -model.eval(np.column_stack([d, z]), sigma_min)

    return RieszEstimate(alpha, RieszMethod.AME_DSM, {"sigma_min": sigma_min})


def riesz_ape(model, quad):
    """alpha(x) = exp(int_0^1 s dt) - exp(-int_-1^0 s dt) over x = (d, z)."""
    estimate = RieszEstimate(None, RieszMethod.APE_EXP, {"quadrature_points": quad.points})

    def alpha(d, z):
        x = np.column_stack([d, z])
        up = _integrate(model, x, 0.0, 1.0, quad, estimate)
        down = _integrate(model, x, -1.0, 0.0, quad, estimate)
        return _safe_exp(up, "log p1/p0") - _safe_exp(-down, "log p-1/p0")

    estimate.fn = alpha
    return estimate


def riesz_ape_from_ame(ame, quad):
    """
    APE representer for the policies D := 1 and D := -1 from an AME representer.

    With d/du log p0(u, z) = -alpha_AME(u, z),
    alpha(d, z) = exp(int_d^1 d/du log p0 du) - exp(int_d^-1 d/du log p0 du).
    """
    def score(u, z):
        return -ame(u, z)

    def alpha(d, z):
        up = integrate_along_treatment(score, d, z, 1.0, quad.points)
        down = integrate_along_treatment(score, d, z, -1.0, quad.points)
        return _safe_exp(up, "log p1/p0") - _safe_exp(down, "log p-1/p0")

    return RieszEstimate(alpha, RieszMethod.APE_FROM_AME,
                         {"source": ame.method.value, "quadrature_points": quad.points})


def ame_ape_bridge_check(treatment_score, z, quad):
    """
    Integrals of u -> d/du log p0(u, z) over [0, 1] and [0, -1].

    Args:
        treatment_score: callable (u, z) -> d/du log p0(u, z)
        z: covariates, shape (n, d_z)
        quad: Quadrature supplying the node count

    Returns:
        Tuple (log p0(1, z) - log p0(0, z), log p0(-1, z) - log p0(0, z)) estimates
    """
    z = np.atleast_2d(np.asarray(z, dtype=np.float64))
    start = np.zeros(len(z))
    plus = integrate_along_treatment(treatment_score, start, z, 1.0, quad.points)
    minus = integrate_along_treatment(treatment_score, start, z, -1.0, quad.points)
    return plus, minus


def export_representer(estimate, d, z, path):
    """Write representer values as CSV with columns d, z1..zK, alpha_hat."""
    d = np.atleast_1d(np.asarray(d, dtype=np.float64))
    z = np.asarray(z, dtype=np.float64).reshape(len(d), -1)
    frame = pd.DataFrame({"d": d})
    for j in range(z.shape[1]):
        frame[f"z{j + 1}"] = z[:, j]
    frame["alpha_hat"] = estimate(d, z)
    try:
        frame.to_csv(path, index=False, float_format="%.17g")
    except OSError as e:
        raise RieszError(f"Failed to write representer {path}: {e}") from e
