"""Tests for the synthetic processes and their analytic oracles."""

import json

import numpy as np
import pytest
from numpy.testing import assert_allclose, assert_array_equal

from scoreriesz.core import TreatmentKind, make_rng
from scoreriesz.synth import (
    DgpKind,
    DgpSpec,
    SynthError,
    build_oracle,
    generate,
    oracle_theta,
    read_oracle,
    write_oracle,
)

MC_ROWS = 200_000


class TestSpec:
    @pytest.mark.parametrize("overrides", [
        {"kind": "ate-forest"},
        {"kind": "ame-gauss", "outcome": {"d": 1.0, "zz": 2.0}},
        {"kind": "ame-gauss", "dim_z": 21},
        {"kind": "ame-gauss", "dim_z": -1},
        {"kind": "ate-gauss", "dim_z": 0},
        {"kind": "ate-gauss", "pi": 1.0},
        {"kind": "ame-gauss", "cond_var": 0.0},
        {"kind": "ame-gauss", "noise_sd": -1.0},
    ])
    def test_invalid(self, overrides):
        with pytest.raises(SynthError):
            DgpSpec(**overrides)

    def test_dict_round_trip(self):
        spec = DgpSpec("ape-gauss", dim_z=3, mu=0.7)
        assert DgpSpec.from_dict(spec.to_dict()) == spec

    def test_from_dict_unknown_field(self):
        with pytest.raises(SynthError):
            DgpSpec.from_dict({"kind": "ame-gauss", "rho": 0.3})


class TestOracleTheta:
    def test_ate(self):
        spec = DgpSpec("ate-gauss", dim_z=2, mu=1.0, pi=0.7, outcome={"d": 1.0, "dz": 0.5})
        assert oracle_theta(spec) == pytest.approx(2.0 + 2.0 * 0.5 * 2 * 1.0 * 0.4)

    @pytest.mark.parametrize("kind", ["ame-gauss", "ame-bounded"])
    def test_ame(self, kind):
        assert oracle_theta(DgpSpec(kind, outcome={"d": 1.5, "dd": 2.0, "dz": 1.0})) == 1.5

    def test_ape(self):
        assert oracle_theta(DgpSpec("ape-gauss", mu=0.4, outcome={"d": 2.0})) == pytest.approx(1.6)

    def test_ate_monte_carlo(self):
        spec = DgpSpec("ate-gauss", dim_z=2, mu=0.5, pi=0.3, outcome={"d": 1.0, "dz": 0.5, "z": 1.0})
        dataset, bundle = generate(spec, MC_ROWS, make_rng(1))
        z = dataset.covariates
        ones = np.ones(len(z))
        contrast = bundle.gamma0(ones, z) - bundle.gamma0(-ones, z)
        assert contrast.mean() == pytest.approx(bundle.theta0, abs=0.02)

    @pytest.mark.parametrize("kind", ["ame-gauss", "ame-bounded"])
    def test_ame_monte_carlo(self, kind):
        spec = DgpSpec(kind, dim_z=2, outcome={"d": 1.0, "dd": 0.5, "dz": 1.0})
        dataset, bundle = generate(spec, MC_ROWS, make_rng(2))
        slopes = bundle.d_gamma0(dataset.treatments, dataset.covariates)
        assert slopes.mean() == pytest.approx(bundle.theta0, abs=0.02)


class TestRieszProperty:
    """E[alpha0 gamma] equals the functional applied to gamma."""

    def test_ate(self):
        spec = DgpSpec("ate-gauss", mu=0.5, outcome={"d": 1.0, "dz": 1.0, "z": 1.0})
        dataset, bundle = generate(spec, MC_ROWS, make_rng(3))
        d, z = dataset.treatments, dataset.covariates
        assert np.mean(bundle.alpha0(d, z) * bundle.gamma0(d, z)) == pytest.approx(
            bundle.theta0, abs=0.05)

    def test_ame(self):
        spec = DgpSpec("ame-gauss", outcome={"d": 1.0, "dd": 1.0, "z": 1.0})
        dataset, bundle = generate(spec, MC_ROWS, make_rng(4))
        d, z = dataset.treatments, dataset.covariates
        assert np.mean(bundle.alpha0(d, z) * bundle.gamma0(d, z)) == pytest.approx(
            bundle.theta0, abs=0.05)

    def test_ape(self):
        spec = DgpSpec("ape-gauss", mu=0.5, outcome={"d": 1.0, "z": 1.0})
        dataset, bundle = generate(spec, MC_ROWS, make_rng(5))
        d, z = dataset.treatments, dataset.covariates
        assert np.mean(bundle.alpha0(d, z) * bundle.gamma0(d, z)) == pytest.approx(
            bundle.theta0, abs=0.05)


class TestAteOracles:
    def test_ratio_form_agrees(self, rng):
        bundle = build_oracle(DgpSpec("ate-gauss", dim_z=2, mu=0.8, pi=0.35))
        z = rng.standard_normal((30, 2))
        d = np.where(rng.random(30) < 0.5, 1.0, -1.0)
        assert_allclose(bundle.alpha0_from_ratio(d, z), bundle.alpha0(d, z), rtol=1e-10)

    def test_log_ratio(self, rng):
        mu, pi = 0.8, 0.35
        bundle = build_oracle(DgpSpec("ate-gauss", mu=mu, pi=pi))
        z = rng.standard_normal((10, 1))
        expected = np.log(pi + (1.0 - pi) * np.exp(-2.0 * mu * z[:, 0]))
        assert_allclose(bundle.log_ratio_p0_p1(z), expected, rtol=1e-10)


class TestGenerate:
    def test_reproducible(self):
        first, _ = generate(DgpSpec("ame-gauss"), 100, make_rng(9))
        second, _ = generate(DgpSpec("ame-gauss"), 100, make_rng(9))
        assert_array_equal(first.outcomes, second.outcomes)
        assert_array_equal(first.treatments, second.treatments)

    def test_ate_coding_and_share(self):
        dataset, _ = generate(DgpSpec("ate-gauss", pi=0.3), 20_000, make_rng(6))
        assert dataset.treatment_kind is TreatmentKind.BINARY
        assert dataset.treated_share() == pytest.approx(0.3, abs=0.02)

    def test_bounded_support(self):
        dataset, bundle = generate(DgpSpec("ame-bounded"), 5000, make_rng(7))
        assert np.all(np.abs(dataset.treatments) <= 1.0)
        assert bundle.bridge_oracle is None

    def test_zero_covariates(self):
        dataset, bundle = generate(DgpSpec("ame-gauss", dim_z=0), 50, make_rng(8))
        assert dataset.dim_z == 0
        assert_allclose(bundle.alpha0(dataset.treatments, dataset.covariates),
                        dataset.treatments / 0.25)

    def test_treatment_score_is_negative_alpha(self, rng):
        bundle = build_oracle(DgpSpec("ame-gauss", dim_z=2))
        d, z = rng.standard_normal(5), rng.standard_normal((5, 2))
        assert_allclose(bundle.treatment_score(d, z), -bundle.alpha0(d, z))

    @pytest.mark.parametrize("n", [0, -3, 2.5])
    def test_invalid_size(self, n):
        with pytest.raises(SynthError):
            generate(DgpSpec("ame-gauss"), n, make_rng(0))

    def test_noise_free(self):
        dataset, bundle = generate(DgpSpec("ape-gauss", noise_sd=0.0), 20, make_rng(0))
        assert_allclose(dataset.outcomes, bundle.gamma0(dataset.treatments, dataset.covariates))


class TestOracleFile:
    def test_round_trip(self, tmp_path):
        spec = DgpSpec(DgpKind.AME_BOUNDED, dim_z=2)
        path = tmp_path / "oracle.json"
        write_oracle(spec, str(path), seed=17)
        payload = json.loads(path.read_text())
        assert payload["dgp"] == "ame-bounded"
        assert payload["bounded"] is True
        assert payload["seed"] == 17
        loaded, theta0 = read_oracle(str(path))
        assert loaded == spec
        assert theta0 == oracle_theta(spec)

    def test_unreadable(self, tmp_path):
        path = tmp_path / "oracle.json"
        path.write_text('{"dgp": "ame-gauss"}')
        with pytest.raises(SynthError):
            read_oracle(str(path))
        with pytest.raises(SynthError):
            read_oracle(str(tmp_path / "missing.json"))
