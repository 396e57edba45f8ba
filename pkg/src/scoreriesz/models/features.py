"""
Basis functions phi_j(x, t) with analytic derivatives in t and x.

Two kinds are provided: a full polynomial of bounded degree in (x, t), and
Gaussian radial bases on x crossed with powers of t. Either can be split at
t = 0 into independent t >= 0 and t < 0 copies for two-sided bridges, whose
time scores jump at the origin.
"""

from dataclasses import dataclass

import numpy as np
from scipy.spatial.distance import pdist
from sklearn.preprocessing import PolynomialFeatures


class FeatureError(Exception):
    """Exception raised for invalid feature maps or inputs."""
    pass


# a time just left of t = 0; split maps send it to the t < 0 copy
LEFT_OF_ZERO = -1e-12


@dataclass(frozen=True)
class FeatureBatch:
    """Features of a batch: values (B, p), t-partials (B, p), x-gradients (B, p, dim)."""

    values: np.ndarray
    dt: np.ndarray
    dx: np.ndarray


def as_batch(x, t, dim):
    """Coerce (x, t) to shapes (B, dim) and (B,)."""
    x = np.atleast_1d(np.asarray(x, dtype=np.float64))
    if x.ndim == 1 and x.size % dim == 0:
        x = x.reshape(-1, dim)
    if x.ndim != 2 or x.shape[1] != dim:
        raise FeatureError(f"Expected points of dimension {dim}, got shape {x.shape}")
    t = np.broadcast_to(np.asarray(t, dtype=np.float64), (len(x),))
    return x, t


def monomials(u, powers, with_grad=True):
    """
    Evaluate monomials prod_k u_k^powers[j, k] and their gradients.

    Args:
        u: inputs of shape (B, m)
        powers: exponent table of shape (p, m)

    Returns:
        Tuple (values (B, p), grads (B, p, m) or None)
    """
    values = np.prod(u[:, None, :] ** powers[None, :, :], axis=2)
    if not with_grad:
        return values, None
    grads = np.empty(values.shape + (u.shape[1],))
    for k in range(u.shape[1]):
        lowered = powers.copy()
        lowered[:, k] = np.maximum(lowered[:, k] - 1, 0)
        grads[:, :, k] = powers[:, k] * np.prod(u[:, None, :] ** lowered[None, :, :], axis=2)
    return values, grads


def _split(batch, t):
    pos = (t >= 0.0).astype(np.float64)[:, None]
    neg = 1.0 - pos
    return FeatureBatch(
        values=np.concatenate([batch.values * pos, batch.values * neg], axis=1),
        dt=np.concatenate([batch.dt * pos, batch.dt * neg], axis=1),
        dx=np.concatenate([batch.dx * pos[:, :, None], batch.dx * neg[:, :, None]], axis=1),
    )


class PolynomialTimeFeatures:
    """All monomials in (x, t) up to total degree `degree`, bias included."""

    kind = "polynomial"

    def __init__(self, dim, degree=3, split_at_zero=False):
        if dim < 1:
            raise FeatureError(f"Input dimension must be >= 1, got {dim}")
        self.dim = int(dim)
        self.degree = int(degree)
        self.split_at_zero = bool(split_at_zero)
        # the exponent table is all sklearn is needed for
        poly = PolynomialFeatures(degree=self.degree, include_bias=True)
        poly.fit(np.zeros((1, self.dim + 1)))
        self.powers = poly.powers_.astype(np.int64)

    @property
    def count(self):
        return len(self.powers) * (2 if self.split_at_zero else 1)

    def evaluate(self, x, t):
        x, t = as_batch(x, t, self.dim)
        u = np.column_stack([x, t])
        values, grads = monomials(u, self.powers)
        batch = FeatureBatch(values=values, dt=grads[:, :, -1], dx=grads[:, :, :-1])
        return _split(batch, t) if self.split_at_zero else batch

    def to_dict(self):
        return {"kind": self.kind, "dim": self.dim, "degree": self.degree,
                "split_at_zero": self.split_at_zero}


class RbfTimeFeatures:
    """
    Gaussian bumps exp(-|x - c_m|^2 / (2 h^2)) times t^k, k = 0..t_degree,
    together with the plain powers t^k.
    """

    kind = "rbf"

    def __init__(self, centers, bandwidth, t_degree=3, split_at_zero=False):
        self.centers = np.atleast_2d(np.asarray(centers, dtype=np.float64))
        self.dim = self.centers.shape[1]
        self.bandwidth = float(bandwidth)
        if self.bandwidth <= 0:
            raise FeatureError(f"RBF bandwidth must be positive, got {bandwidth}")
        self.t_degree = int(t_degree)
        self.split_at_zero = bool(split_at_zero)

    @property
    def count(self):
        base = (len(self.centers) + 1) * (self.t_degree + 1)
        return base * (2 if self.split_at_zero else 1)

    def evaluate(self, x, t):
        x, t = as_batch(x, t, self.dim)
        h2 = self.bandwidth ** 2
        diff = x[:, None, :] - self.centers[None, :, :]
        bumps = np.exp(-0.5 * np.sum(diff ** 2, axis=2) / h2)
        bumps = np.column_stack([np.ones(len(x)), bumps])
        bump_dx = np.concatenate([np.zeros((len(x), 1, self.dim)),
                                  -diff / h2 * bumps[:, 1:, None]], axis=1)

        k = np.arange(self.t_degree + 1)
        t_pow = t[:, None] ** k
        t_dpow = k * t[:, None] ** np.maximum(k - 1, 0)

        batch = FeatureBatch(
            values=(bumps[:, :, None] * t_pow[:, None, :]).reshape(len(x), -1),
            dt=(bumps[:, :, None] * t_dpow[:, None, :]).reshape(len(x), -1),
            dx=(bump_dx[:, :, None, :] * t_pow[:, None, :, None]).reshape(len(x), -1, self.dim),
        )
        return _split(batch, t) if self.split_at_zero else batch

    def to_dict(self):
        return {"kind": self.kind, "centers": self.centers.tolist(),
                "bandwidth": self.bandwidth, "t_degree": self.t_degree,
                "split_at_zero": self.split_at_zero}


def create_rbf_features(samples, n_centers, rng, t_degree=3, split_at_zero=False):
    """
    RBF features with centers drawn from `samples` and the median pairwise
    distance of the centers as bandwidth.
    """
    samples = np.atleast_2d(np.asarray(samples, dtype=np.float64))
    n_centers = min(int(n_centers), len(samples))
    centers = samples[rng.choice(len(samples), size=n_centers, replace=False)]
    distances = pdist(centers) if n_centers > 1 else np.array([1.0])
    bandwidth = float(np.median(distances[distances > 0])) if np.any(distances > 0) else 1.0
    return RbfTimeFeatures(centers, bandwidth, t_degree=t_degree, split_at_zero=split_at_zero)


def features_from_dict(data):
    kind = data.get("kind")
    if kind == PolynomialTimeFeatures.kind:
        return PolynomialTimeFeatures(data["dim"], data["degree"], data["split_at_zero"])
    if kind == RbfTimeFeatures.kind:
        return RbfTimeFeatures(data["centers"], data["bandwidth"], data["t_degree"],
                               data["split_at_zero"])
    raise FeatureError(f"Unknown feature kind: {kind}")
