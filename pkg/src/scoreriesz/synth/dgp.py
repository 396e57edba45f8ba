"""
Synthetic data-generating processes with analytic oracles.

Three families:
    ate-gauss    binary D = +1 w.p. pi, Z | D ~ N(D mu 1, I)
    ame-gauss    Z ~ N(0, I), D | Z ~ N(c mean(Z), s2)
    ame-bounded  as ame-gauss with D | Z truncated to [-1, 1]
    ape-gauss    D ~ N(0, 1) independent of Z ~ N(0, I); policies shift D by +-mu

Outcomes are Y = gamma0(D, Z) + noise_sd * N(0, 1) with
gamma0(d, z) = const + d_coef d + dd d^2 + z_coef sum(z) + dz d sum(z).
"""

import json
import logging
from dataclasses import asdict, dataclass, field
from enum import Enum

import numpy as np
from scipy.special import expit, logit, logsumexp
from scipy.stats import truncnorm

from ..bridges import (
    ConditionalGaussianAmeOracle,
    create_ate_mixture_oracle,
    create_gaussian_oracle,
    create_schedule,
)
from ..core import Dataset, TreatmentKind

logger = logging.getLogger(__name__)

OUTCOME_TERMS = ("const", "d", "dd", "z", "dz")
MAX_DIM_Z = 20


class SynthError(Exception):
    """Exception raised for invalid data-generating process specifications."""
    pass


class DgpKind(str, Enum):
    ATE_GAUSS = "ate-gauss"
    AME_GAUSS = "ame-gauss"
    AME_BOUNDED = "ame-bounded"
    APE_GAUSS = "ape-gauss"


@dataclass(frozen=True)
class DgpSpec:
    """Parameters of a synthetic process."""

    kind: DgpKind
    dim_z: int = 1
    mu: float = 1.0
    pi: float = 0.5
    slope: float = 0.5
    cond_var: float = 0.25
    noise_sd: float = 1.0
    outcome: dict = field(default_factory=lambda: {"d": 1.0, "z": 1.0})

    def __post_init__(self):
        try:
            object.__setattr__(self, "kind", DgpKind(self.kind))
        except ValueError:
            raise SynthError(f"Unknown data-generating process: {self.kind}")
        unknown = set(self.outcome) - set(OUTCOME_TERMS)
        if unknown:
            raise SynthError(f"Unsupported outcome terms: {', '.join(sorted(unknown))}")
        if not isinstance(self.dim_z, int) or not 0 <= self.dim_z <= MAX_DIM_Z:
            raise SynthError(f"dim_z must be an integer in [0, {MAX_DIM_Z}], got {self.dim_z}")
        if self.kind is DgpKind.ATE_GAUSS and self.dim_z < 1:
            raise SynthError("The ATE process needs at least one covariate")
        if not 0.0 < self.pi < 1.0:
            raise SynthError(f"pi must lie in (0, 1), got {self.pi}")
        if not self.cond_var > 0:
            raise SynthError(f"cond_var must be positive, got {self.cond_var}")
        if self.noise_sd < 0:
            raise SynthError(f"noise_sd must be non-negative, got {self.noise_sd}")

    @property
    def treatment_kind(self):
        if self.kind is DgpKind.ATE_GAUSS:
            return TreatmentKind.BINARY
        return TreatmentKind.CONTINUOUS

    @property
    def bounded(self):
        return self.kind is DgpKind.AME_BOUNDED

    def coef(self, term):
        return float(self.outcome.get(term, 0.0))

    def to_dict(self):
        values = asdict(self)
        values["kind"] = self.kind.value
        return values

    @classmethod
    def from_dict(cls, values):
        try:
            return cls(**values)
        except TypeError as e:
            raise SynthError(f"Failed to build process spec: {e}") from e


@dataclass(frozen=True)
class OracleBundle:
    """
    Analytic truths of a process. Fields that do not apply to a family are None.

    alpha0(d, z), gamma0(d, z) and d_gamma0(d, z) act on rows; propensity(z),
    alpha0_from_ratio(d, z) and log_ratio_p0_p1(z) exist for ate-gauss;
    treatment_score(u, z) = d/du log p0(u, z) for the AME families.
    """

    theta0: float
    gamma0: object
    d_gamma0: object
    alpha0: object
    bridge_oracle: object = None
    propensity: object = None
    alpha0_from_ratio: object = None
    log_ratio_p0_p1: object = None
    treatment_score: object = None


def _zsum(z):
    z = np.atleast_2d(np.asarray(z, dtype=np.float64))
    return z.sum(axis=1)


def _zmean(z):
    z = np.atleast_2d(np.asarray(z, dtype=np.float64))
    return z.mean(axis=1) if z.shape[1] else np.zeros(len(z))


def _outcome_functions(spec):
    c0, cd, cdd, cz, cdz = (spec.coef(term) for term in OUTCOME_TERMS)

    def gamma0(d, z):
        d = np.asarray(d, dtype=np.float64)
        s = _zsum(z) if np.size(z) else np.zeros_like(d)
        return c0 + cd * d + cdd * d * d + cz * s + cdz * d * s

    def d_gamma0(d, z):
        d = np.asarray(d, dtype=np.float64)
        s = _zsum(z) if np.size(z) else np.zeros_like(d)
        return cd + 2.0 * cdd * d + cdz * s

    return gamma0, d_gamma0


def oracle_theta(spec):
    """
    Exact target parameter from Gaussian moments.

    ATE: 2 b_d + 2 b_dz E[sum Z] with E[sum Z] = dim_z mu (2 pi - 1).
    AME: b_d, since E[D] = E[sum Z] = 0 (also under symmetric truncation).
    APE: 2 mu b_d, since E[D] = E[sum Z] = 0 and D is independent of Z.
    """
    if spec.kind is DgpKind.ATE_GAUSS:
        zsum_mean = spec.dim_z * spec.mu * (2.0 * spec.pi - 1.0)
        return 2.0 * spec.coef("d") + 2.0 * spec.coef("dz") * zsum_mean
    if spec.kind in (DgpKind.AME_GAUSS, DgpKind.AME_BOUNDED):
        return spec.coef("d")
    if spec.kind is DgpKind.APE_GAUSS:
        return 2.0 * spec.mu * spec.coef("d")
    raise SynthError(f"No closed-form target for {spec.kind}")


def _ate_oracles(spec):
    mu, pi = spec.mu, spec.pi

    def propensity(z):
        return expit(2.0 * mu * _zsum(z) + logit(pi))

    def alpha0(d, z):
        e = propensity(z)
        d = np.asarray(d, dtype=np.float64)
        return np.where(d == 1.0, 1.0 / e, 0.0) - np.where(d == -1.0, 1.0 / (1.0 - e), 0.0)

    def log_ratio_p0_p1(z):
        # p0 / p1 = pi + (1 - pi) exp(-2 mu sum(z))
        s = _zsum(z)
        return logsumexp(np.stack([np.full_like(s, np.log(pi)),
                                   np.log(1.0 - pi) - 2.0 * mu * s]), axis=0)

    def alpha0_from_ratio(d, z):
        # p0 / p-1 = (1 - pi) + pi exp(2 mu sum(z))
        s = _zsum(z)
        ratio_pos = np.exp(log_ratio_p0_p1(z))
        ratio_neg = (1.0 - pi) + pi * np.exp(2.0 * mu * s)
        d = np.asarray(d, dtype=np.float64)
        return (np.where(d == 1.0, ratio_pos / pi, 0.0)
                - np.where(d == -1.0, ratio_neg / (1.0 - pi), 0.0))

    return dict(alpha0=alpha0, propensity=propensity, log_ratio_p0_p1=log_ratio_p0_p1,
                alpha0_from_ratio=alpha0_from_ratio,
                bridge_oracle=create_ate_mixture_oracle(mu, pi, spec.dim_z))


def _ame_oracles(spec):
    slope, s2 = spec.slope, spec.cond_var

    def alpha0(d, z):
        return (np.asarray(d, dtype=np.float64) - slope * _zmean(z)) / s2

    def treatment_score(u, z):
        return -alpha0(u, z)

    bridge = None if spec.bounded else ConditionalGaussianAmeOracle(slope, s2, spec.dim_z)
    return dict(alpha0=alpha0, treatment_score=treatment_score, bridge_oracle=bridge)


def _ape_oracles(spec):
    mu = spec.mu

    def alpha0(d, z):
        d = np.asarray(d, dtype=np.float64)
        return np.exp(mu * d - 0.5 * mu * mu) - np.exp(-mu * d - 0.5 * mu * mu)

    shift = np.zeros(1 + spec.dim_z)
    shift[0] = mu
    bridge = create_gaussian_oracle(np.zeros(1 + spec.dim_z), shift,
                                    schedule=create_schedule("two-sided-abs"),
                                    mu_negative=-shift)
    return dict(alpha0=alpha0, bridge_oracle=bridge)


def build_oracle(spec):
    """Analytic oracle bundle of a process."""
    gamma0, d_gamma0 = _outcome_functions(spec)
    if spec.kind is DgpKind.ATE_GAUSS:
        extra = _ate_oracles(spec)
    elif spec.kind in (DgpKind.AME_GAUSS, DgpKind.AME_BOUNDED):
        extra = _ame_oracles(spec)
    else:
        extra = _ape_oracles(spec)
    return OracleBundle(theta0=oracle_theta(spec), gamma0=gamma0, d_gamma0=d_gamma0, **extra)


def _draw_regressors(spec, n, rng):
    if spec.kind is DgpKind.ATE_GAUSS:
        d = np.where(rng.random(n) < spec.pi, 1.0, -1.0)
        z = d[:, None] * spec.mu + rng.standard_normal((n, spec.dim_z))
        return d, z
    z = rng.standard_normal((n, spec.dim_z))
    if spec.kind is DgpKind.APE_GAUSS:
        return rng.standard_normal(n), z
    center = spec.slope * _zmean(z) if spec.dim_z else np.zeros(n)
    scale = np.sqrt(spec.cond_var)
    if spec.kind is DgpKind.AME_BOUNDED:
        lower, upper = (-1.0 - center) / scale, (1.0 - center) / scale
        d = truncnorm.rvs(lower, upper, loc=center, scale=scale, size=n, random_state=rng)
        return d, z
    return center + scale * rng.standard_normal(n), z


def generate(spec, n, rng):
    """
    Draw n rows from a process.

    Returns:
        Tuple (Dataset, OracleBundle)
    """
    if not isinstance(n, (int, np.integer)) or n < 1:
        raise SynthError(f"n must be a positive integer, got {n}")
    d, z = _draw_regressors(spec, int(n), rng)
    bundle = build_oracle(spec)
    y = bundle.gamma0(d, z) + spec.noise_sd * rng.standard_normal(int(n))
    dataset = Dataset(outcomes=y, treatments=d, covariates=z,
                      treatment_kind=spec.treatment_kind)
    logger.info("Generated %d rows from %s (theta0=%g)", n, spec.kind.value, bundle.theta0)
    return dataset, bundle


def write_oracle(spec, path, seed=None):
    """Write oracle.json with theta0 and the spec parameters."""
    payload = {"dgp": spec.kind.value, "theta0": float(oracle_theta(spec)),
               "bounded": spec.bounded, "spec": spec.to_dict()}
    if seed is not None:
        payload["seed"] = int(seed)
    try:
        with open(path, "w", encoding="utf-8") as handle:
            json.dump(payload, handle, indent=2, sort_keys=True)
            handle.write("\n")
    except OSError as e:
        raise SynthError(f"Failed to write oracle file {path}: {e}") from e


def read_oracle(path):
    """Read oracle.json; returns (DgpSpec, theta0)."""
    try:
        with open(path, "r", encoding="utf-8") as handle:
            payload = json.load(handle)
        return DgpSpec.from_dict(payload["spec"]), float(payload["theta0"])
    except (OSError, json.JSONDecodeError, KeyError, TypeError) as e:
        raise SynthError(f"Failed to read oracle file {path}: {e}") from e
