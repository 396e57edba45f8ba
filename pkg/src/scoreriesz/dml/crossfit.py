"""
Cross-fitted orthogonal estimation.

For each fold k the representer and the outcome regression are trained on the
other folds and evaluated on fold k. The estimate solves the empirical moment
condition mean(psi) = 0:

    theta = mean(alpha (Y - gamma) + m(W, gamma)),  V = mean(psi^2),
    se = sqrt(V / n),  CI = theta +- 1.96 se.
"""

import logging
from dataclasses import dataclass, field

import numpy as np
from joblib import Parallel, delayed
from sklearn.model_selection import KFold

from ..core import derive_seed, split_rng
from .functionals import check_functional, orthogonal_score
from .outcome import EstimationError, fit_outcome
from .recipes import get_recipe

logger = logging.getLogger(__name__)

Z_95 = 1.96
MIN_TRAIN_ROWS = 10


@dataclass(frozen=True)
class FoldPlan:
    """Fold index per sample; folds partition 0..n-1 with sizes differing by <= 1."""

    assignment: np.ndarray
    folds: int
    seed: int

    def test_indices(self, k):
        return np.flatnonzero(self.assignment == k)

    def train_indices(self, k):
        return np.flatnonzero(self.assignment != k)


def make_fold_plan(n, folds, rng):
    """Shuffled K-fold assignment seeded from `rng`."""
    if folds < 2:
        raise EstimationError(f"Cross fitting needs at least 2 folds, got {folds}")
    if n < folds:
        raise EstimationError(f"Cannot split {n} rows into {folds} folds")
    seed = derive_seed(rng)
    assignment = np.empty(n, dtype=np.int64)
    splitter = KFold(n_splits=folds, shuffle=True, random_state=seed)
    for k, (_, test) in enumerate(splitter.split(np.zeros((n, 1)))):
        assignment[test] = k
    return FoldPlan(assignment=assignment, folds=folds, seed=seed)


@dataclass(frozen=True)
class EstimateReport:
    """Point estimate with plug-in variance, standard error and 95% interval."""

    theta_hat: float
    variance_hat: float
    se: float
    ci_95: tuple
    n: int
    folds: list
    method: str
    warnings: dict = field(default_factory=dict)

    def __post_init__(self):
        if not np.isclose(self.se, np.sqrt(self.variance_hat / self.n), rtol=1e-12, atol=0.0):
            raise EstimationError("Report standard error disagrees with its variance")
        lower, upper = self.ci_95
        if not (np.isclose(lower, self.theta_hat - Z_95 * self.se)
                and np.isclose(upper, self.theta_hat + Z_95 * self.se)):
            raise EstimationError("Report interval disagrees with its standard error")


def summarize(components, n, folds, method, warnings=None):
    """Build the report from per-row alpha (Y - gamma) + m values."""
    theta = float(np.mean(components))
    psi = components - theta
    variance = float(np.mean(psi ** 2))
    se = float(np.sqrt(variance / n))
    return EstimateReport(theta_hat=theta, variance_hat=variance, se=se,
                          ci_95=(theta - Z_95 * se, theta + Z_95 * se), n=n,
                          folds=folds, method=method, warnings=dict(warnings or {}))


def _process_fold(dataset, plan, k, kind, recipe, cfg, rng, nuisances, options):
    test = dataset.subset(plan.test_indices(k))
    if nuisances is None:
        train = dataset.subset(plan.train_indices(k))
        logger.info("Fold %d: training on %d rows", k, train.n)
        alpha = recipe(train, cfg, rng, options)
        outcome = fit_outcome(train, cfg.outcome_degree, cfg.ridge)
        n_train = train.n
    else:
        alpha, outcome = nuisances
        n_train = 0
    d, z, y = test.treatments, test.covariates, test.outcomes
    alpha_values = alpha(d, z)
    components = orthogonal_score(alpha, outcome, kind, y, d, z, alpha_values=alpha_values)
    if not np.all(np.isfinite(components)):
        raise EstimationError(f"Non-finite orthogonal score in fold {k}")
    diagnostics = {"fold": k, "n_train": n_train, "n_test": test.n,
                   "alpha_mean": float(np.mean(alpha_values))}
    return components, diagnostics, dict(getattr(alpha, "warnings", {}))


def cross_fit_estimate(dataset, method, cfg, rng, nuisances=None, options=None):
    """
    Cross-fitted estimate of the functional targeted by `method`.

    Args:
        dataset: Dataset
        method: recipe name such as "ate-tsm" or "ame-dsm"
        cfg: RunConfig (folds, n_jobs and training settings)
        rng: numpy Generator
        nuisances: optional fixed (alpha, outcome) pair that skips training
        options: recipe options (policy_shift, bounded)

    Returns:
        EstimateReport
    """
    kind, recipe = get_recipe(method)
    kind = check_functional(kind, dataset)
    options = dict(options or {})
    if nuisances is None:
        min_n = int(np.ceil(MIN_TRAIN_ROWS * cfg.folds / (cfg.folds - 1)))
        if dataset.n < max(min_n, cfg.folds):
            raise EstimationError(
                f"{dataset.n} rows are too few to train on {cfg.folds} folds; need n >= {min_n}")

    plan = make_fold_plan(dataset.n, cfg.folds, rng)
    fold_rngs = split_rng(rng, cfg.folds)
    results = Parallel(n_jobs=cfg.n_jobs, backend="threading")(
        delayed(_process_fold)(dataset, plan, k, kind, recipe, cfg, fold_rngs[k],
                               nuisances, options)
        for k in range(cfg.folds))

    components = np.empty(dataset.n)
    warnings = {}
    diagnostics = []
    for k, (values, diag, fold_warnings) in enumerate(results):
        components[plan.test_indices(k)] = values
        diagnostics.append(diag)
        for name, count in fold_warnings.items():
            warnings[name] = warnings.get(name, 0) + count

    label = "oracle-aipw" if nuisances is not None else method
    report = summarize(components, dataset.n, diagnostics, label, warnings)
    logger.info("%s: theta_hat=%.6g se=%.4g", label, report.theta_hat, report.se)
    return report
