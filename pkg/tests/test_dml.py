"""Tests for nuisances, functionals, the Riesz regression baseline and cross fitting."""

import numpy as np
import pytest
from numpy.testing import assert_allclose, assert_array_equal

from scoreriesz.core import Dataset, RunConfig, make_rng
from scoreriesz.dml import (
    METHODS,
    EstimateReport,
    EstimationError,
    Functional,
    OracleOutcome,
    check_functional,
    cross_fit_estimate,
    fit_outcome,
    get_recipe,
    m_functional,
    make_fold_plan,
    orthogonal_score,
    riesz_loss,
    riesz_regression_baseline,
    summarize,
)
from scoreriesz.riesz import RieszEstimate, RieszMethod
from scoreriesz.synth import DgpSpec, generate


def _oracle_nuisances(bundle):
    alpha = RieszEstimate(lambda d, z: bundle.alpha0(d, z), RieszMethod.BASELINE)
    return alpha, OracleOutcome(bundle.gamma0, bundle.d_gamma0)


class TestOutcome:
    def test_recovers_quadratic_outcome(self):
        spec = DgpSpec("ame-gauss", dim_z=2, noise_sd=0.0,
                       outcome={"const": 0.5, "d": 1.0, "dd": 0.5, "dz": 2.0})
        dataset, bundle = generate(spec, 500, make_rng(3))
        model = fit_outcome(dataset, degree=2)
        d, z = dataset.treatments[:20], dataset.covariates[:20]
        assert_allclose(model.predict(d, z), bundle.gamma0(d, z), atol=1e-4)
        assert_allclose(model.d_derivative(d, z), bundle.d_gamma0(d, z), atol=1e-4)

    def test_needs_two_rows(self):
        data = Dataset([1.0], [0.5], np.zeros((1, 1)), "continuous")
        with pytest.raises(EstimationError):
            fit_outcome(data)

    def test_oracle_outcome(self):
        outcome = OracleOutcome(lambda d, z: d * z[:, 0], lambda d, z: z[:, 0])
        assert_allclose(outcome.predict([2.0, 3.0], [[1.0], [2.0]]), [2.0, 6.0])
        assert_allclose(outcome.d_derivative([2.0, 3.0], [[1.0], [2.0]]), [1.0, 2.0])


class TestFunctionals:
    def test_check_functional(self, tiny_binary, ame_data):
        assert check_functional("ATE", tiny_binary) is Functional.ATE
        with pytest.raises(EstimationError):
            check_functional("AME", tiny_binary)
        with pytest.raises(EstimationError):
            check_functional("ATE", ame_data[0])

    def test_ate_contrast(self):
        outcome = OracleOutcome(lambda d, z: 3.0 * d + d * z[:, 0], lambda d, z: 3.0 + z[:, 0])
        m = m_functional("ATE", outcome, np.array([1.0, -1.0]), np.array([[0.5], [2.0]]))
        assert_allclose(m, [7.0, 10.0])

    def test_ame_derivative(self):
        outcome = OracleOutcome(lambda d, z: d ** 2, lambda d, z: 2.0 * d)
        assert_allclose(m_functional("AME", outcome, [1.5], [[0.0]]), [3.0])

    def test_ape_needs_alpha(self):
        outcome = OracleOutcome(lambda d, z: d, lambda d, z: np.ones_like(d))
        with pytest.raises(EstimationError):
            m_functional("APE", outcome, [1.0], [[0.0]])
        m = m_functional("APE", outcome, [2.0], [[0.0]], alpha=lambda d, z: 0.5 * d)
        assert_allclose(m, [2.0])

    def test_orthogonal_score_at_truth(self):
        outcome = OracleOutcome(lambda d, z: d + z[:, 0], lambda d, z: np.ones_like(d))
        d, z = np.array([0.2, -0.4]), np.array([[1.0], [0.0]])
        y = outcome.predict(d, z)
        psi = orthogonal_score(lambda d, z: 10.0 * d, outcome, "AME", y, d, z, theta=1.0)
        assert_allclose(psi, 0.0, atol=1e-12)


    def test_orthogonal_score_reuses_alpha_values(self):
        outcome = OracleOutcome(lambda d, z: d, lambda d, z: np.ones_like(d))
        calls = []

        def alpha(d, z):
            calls.append(len(d))
            return 0.5 * d

        d, z, y = np.array([2.0, 4.0]), np.zeros((2, 1)), np.array([1.0, 1.0])
        psi = orthogonal_score(alpha, outcome, "APE", y, d, z)
        # alpha (y - gamma) + gamma alpha = alpha y
        assert_allclose(psi, [1.0, 2.0])
        assert calls == [2]
        psi = orthogonal_score(alpha, outcome, "APE", y, d, z, alpha_values=np.array([1.0, 1.0]))
        assert_allclose(psi, [1.0, 1.0])
        assert calls == [2]

    def test_score_is_insensitive_to_first_order_perturbations(self):
        dataset, bundle = generate(DgpSpec("ame-gauss"), 100_000, make_rng(41))
        d, z, y = dataset.treatments, dataset.covariates, dataset.outcomes

        def h_gamma(d, z):
            return d * (1.0 + z[:, 0])

        def h_alpha(d, z):
            return z[:, 0]

        def psi(delta):
            outcome = OracleOutcome(
                lambda d, z: bundle.gamma0(d, z) + delta * h_gamma(d, z),
                lambda d, z: bundle.d_gamma0(d, z) + delta * (1.0 + z[:, 0]))
            alpha = lambda d, z: bundle.alpha0(d, z) + delta * h_alpha(d, z)  # noqa: E731
            return orthogonal_score(alpha, outcome, "AME", y, d, z)

        delta = 0.1
        slope = (psi(delta) - psi(-delta)) / (2.0 * delta)
        assert abs(slope.mean()) < 4.0 * slope.std() / np.sqrt(len(slope))
        # the plug-in mean of m moves at first order
        plug_in = 1.0 + z[:, 0]
        assert abs(plug_in.mean()) > 10.0 * plug_in.std() / np.sqrt(len(plug_in))
        curvature = (psi(delta) + psi(-delta) - 2.0 * psi(0.0)) / delta ** 2
        assert curvature.mean() == pytest.approx(-2.0 * np.mean(h_gamma(d, z) * h_alpha(d, z)),
                                                 rel=1e-6)


class TestBaseline:
    def test_ame_linear_representer(self, ame_data):
        dataset, bundle = ame_data
        estimate = riesz_regression_baseline(dataset, "AME", degree=1)
        d, z = dataset.treatments, dataset.covariates
        assert np.corrcoef(estimate(d, z), bundle.alpha0(d, z))[0, 1] > 0.95
        assert estimate.method is RieszMethod.BASELINE
        assert riesz_loss("AME", estimate, d, z) < 0.0

    def test_ate_arm_moments(self, ate_data):
        # the intercept of each arm satisfies mean(1[d = +-1] alpha) = +-1
        dataset, _ = ate_data
        estimate = riesz_regression_baseline(dataset, Functional.ATE, degree=2)
        d = dataset.treatments
        alpha = estimate(d, dataset.covariates)
        assert np.mean(alpha * (d == 1.0)) == pytest.approx(1.0, abs=1e-3)
        assert np.mean(alpha * (d == -1.0)) == pytest.approx(-1.0, abs=1e-3)

    def test_ape_unsupported(self):
        dataset, _ = generate(DgpSpec("ape-gauss"), 50, make_rng(0))
        with pytest.raises(EstimationError):
            riesz_regression_baseline(dataset, "APE")

    def test_riesz_loss_values(self):
        d = np.array([1.0, 2.0])
        z = np.zeros((2, 1))
        assert riesz_loss("ATE", lambda d, z: d, d, z) == pytest.approx(-1.5)
        assert riesz_loss("AME", lambda d, z: d ** 2, d, z) == pytest.approx(2.5)


class TestRecipes:
    def test_method_table(self):
        assert set(METHODS) == {"ate-tsm", "ate-logistic", "ame-bridge", "ame-dsm", "ape-tsm",
                                "ate-lsif", "ame-lsif"}
        assert get_recipe("ame-dsm")[0] is Functional.AME

    def test_unknown_method(self):
        with pytest.raises(EstimationError, match="Unknown method"):
            get_recipe("ate-forest")


class TestFoldPlan:
    @pytest.mark.parametrize("n, folds", [(10, 2), (103, 5), (7, 7)])
    def test_partition(self, n, folds, rng):
        plan = make_fold_plan(n, folds, rng)
        sizes = np.bincount(plan.assignment, minlength=folds)
        assert sizes.sum() == n
        assert sizes.max() - sizes.min() <= 1
        for k in range(folds):
            assert_array_equal(np.sort(np.concatenate([plan.test_indices(k),
                                                       plan.train_indices(k)])), np.arange(n))

    def test_reproducible(self):
        first = make_fold_plan(50, 5, make_rng(4))
        second = make_fold_plan(50, 5, make_rng(4))
        assert_array_equal(first.assignment, second.assignment)

    @pytest.mark.parametrize("n, folds", [(10, 1), (3, 5)])
    def test_invalid(self, n, folds, rng):
        with pytest.raises(EstimationError):
            make_fold_plan(n, folds, rng)


class TestReport:
    def test_summarize(self):
        report = summarize(np.array([1.0, 3.0]), 2, [], "ame-lsif")
        assert report.theta_hat == pytest.approx(2.0)
        assert report.variance_hat == pytest.approx(1.0)
        assert report.ci_95 == pytest.approx((2.0 - 1.96 * np.sqrt(0.5), 2.0 + 1.96 * np.sqrt(0.5)))

    def test_inconsistent_report(self):
        with pytest.raises(EstimationError):
            EstimateReport(theta_hat=0.0, variance_hat=1.0, se=2.0, ci_95=(-3.92, 3.92),
                           n=4, folds=[], method="x")


class TestCrossFit:
    def test_oracle_nuisances_cover_truth(self):
        dataset, bundle = generate(DgpSpec("ate-gauss", mu=0.5), 4000, make_rng(21))
        report = cross_fit_estimate(dataset, "ate-tsm", RunConfig(), make_rng(22),
                                    nuisances=_oracle_nuisances(bundle))
        assert report.method == "oracle-aipw"
        assert abs(report.theta_hat - bundle.theta0) < 4.0 * report.se
        assert all(diag["n_train"] == 0 for diag in report.folds)

    def test_baseline_cross_fit(self, ame_data):
        dataset, bundle = ame_data
        report = cross_fit_estimate(dataset, "ame-lsif", RunConfig(feature_degree=1),
                                    make_rng(5))
        assert report.method == "ame-lsif"
        assert report.n == dataset.n
        assert len(report.folds) == 5
        assert sum(diag["n_test"] for diag in report.folds) == dataset.n
        assert abs(report.theta_hat - bundle.theta0) < 4.0 * report.se + 0.05

    def test_reproducible_across_jobs(self, ame_data):
        dataset, _ = ame_data
        serial = cross_fit_estimate(dataset, "ame-lsif", RunConfig(), make_rng(6))
        again = cross_fit_estimate(dataset, "ame-lsif", RunConfig(), make_rng(6))
        threaded = cross_fit_estimate(dataset, "ame-lsif", RunConfig(n_jobs=2), make_rng(6))
        assert serial.theta_hat == again.theta_hat
        assert serial.theta_hat == pytest.approx(threaded.theta_hat, rel=1e-12)

    def test_oracle_estimate_ignores_fold_count(self, ame_data):
        dataset, bundle = ame_data
        nuisances = _oracle_nuisances(bundle)
        two = cross_fit_estimate(dataset, "ame-bridge", RunConfig(folds=2), make_rng(7),
                                 nuisances=nuisances)
        five = cross_fit_estimate(dataset, "ame-bridge", RunConfig(folds=5), make_rng(8),
                                  nuisances=nuisances)
        assert two.theta_hat == pytest.approx(five.theta_hat, rel=1e-12, abs=1e-12)
        assert two.variance_hat == pytest.approx(five.variance_hat, rel=1e-12)
        d, z, y = dataset.treatments, dataset.covariates, dataset.outcomes
        alpha, outcome = nuisances
        expected = orthogonal_score(alpha, outcome, "AME", y, d, z)
        assert five.theta_hat == pytest.approx(expected.mean(), rel=1e-12, abs=1e-12)

    def test_method_must_match_treatment(self, ate_data, cfg, rng):
        with pytest.raises(EstimationError):
            cross_fit_estimate(ate_data[0], "ame-dsm", cfg, rng)

    def test_too_few_rows(self, cfg, rng):
        data = Dataset(np.arange(12.0), np.linspace(-1, 1, 12), np.zeros((12, 1)), "continuous")
        with pytest.raises(EstimationError, match="too few"):
            cross_fit_estimate(data, "ame-lsif", cfg, rng)

    def test_non_finite_score(self, ame_data, cfg, rng):
        dataset, bundle = ame_data
        alpha = RieszEstimate(lambda d, z: np.full(len(d), np.inf), RieszMethod.BASELINE)
        nuisances = (alpha, OracleOutcome(bundle.gamma0, bundle.d_gamma0))
        with pytest.raises(EstimationError, match="Non-finite"):
            cross_fit_estimate(dataset, "ame-bridge", cfg, rng, nuisances=nuisances)

    @pytest.mark.slow
    def test_ame_bridge_coverage(self):
        spec = DgpSpec("ame-gauss")
        cfg = RunConfig(fit_batch=5000, folds=2)
        covered = 0
        reps = 30
        for rep in range(reps):
            dataset, bundle = generate(spec, 1000, make_rng(100 + rep))
            report = cross_fit_estimate(dataset, "ame-bridge", cfg, make_rng(200 + rep))
            lower, upper = report.ci_95
            covered += lower <= bundle.theta0 <= upper
        assert covered / reps >= 0.8

    @pytest.mark.slow
    def test_ate_tsm_close_to_truth(self):
        dataset, bundle = generate(DgpSpec("ate-gauss", mu=0.5), 4000, make_rng(31))
        report = cross_fit_estimate(dataset, "ate-tsm", RunConfig(fit_batch=20000), make_rng(32))
        assert report.method == "ate-tsm"
        assert abs(report.theta_hat - bundle.theta0) < 5.0 * report.se
