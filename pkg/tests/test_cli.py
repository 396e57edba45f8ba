"""Tests for the gen, estimate and benchmark subcommands."""

import json

import pytest

from scoreriesz.cli import main, summarize_replications


def _gen(out_dir, dgp="ame-gauss", n=600, seed=0, *extra):
    args = ["gen", "--dgp", dgp, "--n", str(n), "--seed", str(seed), "--out-dir", str(out_dir)]
    return main(args + list(extra))


def _stdout_json(capsys):
    return json.loads(capsys.readouterr().out)


class TestGen:
    def test_writes_data_and_oracle(self, tmp_path):
        assert _gen(tmp_path, "ame-bounded", 100, 4) == 0
        header = (tmp_path / "data.csv").read_text().splitlines()[0]
        assert header == "y,d,z1"
        oracle = json.loads((tmp_path / "oracle.json").read_text())
        assert oracle["dgp"] == "ame-bounded"
        assert oracle["theta0"] == 1.0
        assert oracle["seed"] == 4

    def test_identical_flags_identical_bytes(self, tmp_path):
        _gen(tmp_path / "a", "ate-gauss", 200, 3)
        _gen(tmp_path / "b", "ate-gauss", 200, 3)
        for name in ("data.csv", "oracle.json"):
            assert (tmp_path / "a" / name).read_bytes() == (tmp_path / "b" / name).read_bytes()

    @pytest.mark.parametrize("argv", [
        ["gen", "--dgp", "ate-forest", "--n", "10"],
        ["gen", "--dgp", "ame-gauss", "--n", "0"],
        ["gen", "--dgp", "ame-gauss"],
        [],
    ])
    def test_usage_errors(self, argv):
        assert main(argv) == 2

    def test_invalid_process_parameters(self, tmp_path):
        assert _gen(tmp_path, "ate-gauss", 10, 0, "--pi", "1.5") == 2

    def test_help(self, capsys):
        assert main(["--help"]) == 0


class TestEstimate:
    def test_baseline_report(self, tmp_path, capsys):
        _gen(tmp_path)
        code = main(["estimate", "--data", str(tmp_path / "data.csv"), "--method", "ame-lsif",
                     "--oracle", str(tmp_path / "oracle.json"), "--out", str(tmp_path / "r.json")])
        assert code == 0
        report = _stdout_json(capsys)
        assert report["method"] == "ame-lsif"
        assert report["n"] == 600
        assert len(report["folds"]) == 5
        assert report["ci_lower"] < report["theta_hat"] < report["ci_upper"]
        assert json.loads((tmp_path / "r.json").read_text()) == report

    def test_oracle_nuisances(self, tmp_path, capsys):
        _gen(tmp_path, "ate-gauss", 2000, 1, "--mu", "0.5")
        code = main(["estimate", "--data", str(tmp_path / "data.csv"), "--method", "ate-tsm",
                     "--oracle", str(tmp_path / "oracle.json"), "--oracle-nuisances"])
        assert code == 0
        report = _stdout_json(capsys)
        assert report["method"] == "oracle-aipw"
        assert abs(report["theta_hat"] - 2.0) < 4.0 * report["se"]

    def test_binary_inferred_without_oracle(self, tmp_path, capsys):
        _gen(tmp_path, "ate-gauss", 400, 2)
        code = main(["estimate", "--data", str(tmp_path / "data.csv"), "--method", "ate-lsif"])
        assert code == 0
        assert _stdout_json(capsys)["method"] == "ate-lsif"

    def test_flags_override_config_file(self, tmp_path, capsys):
        _gen(tmp_path)
        config = tmp_path / "cfg.json"
        config.write_text(json.dumps({"folds": 3, "feature_degree": 1}))
        code = main(["estimate", "--data", str(tmp_path / "data.csv"), "--method", "ame-lsif",
                     "--config", str(config), "--folds", "2"])
        assert code == 0
        assert len(_stdout_json(capsys)["folds"]) == 2

    def test_oracle_nuisances_need_oracle(self, tmp_path):
        _gen(tmp_path)
        assert main(["estimate", "--data", str(tmp_path / "data.csv"), "--method", "ame-bridge",
                     "--oracle-nuisances"]) == 2

    def test_method_must_fit_data(self, tmp_path):
        _gen(tmp_path)
        assert main(["estimate", "--data", str(tmp_path / "data.csv"), "--method", "ate-tsm"]) == 2

    def test_missing_data(self, tmp_path):
        assert main(["estimate", "--data", str(tmp_path / "none.csv"), "--method", "ame-lsif"]) == 2

    def test_invalid_config_value(self, tmp_path):
        _gen(tmp_path)
        assert main(["estimate", "--data", str(tmp_path / "data.csv"), "--method", "ame-lsif",
                     "--quadrature-points", "128"]) == 2

    def test_runtime_failure(self, tmp_path):
        _gen(tmp_path, n=12)
        assert main(["estimate", "--data", str(tmp_path / "data.csv"), "--method", "ame-lsif"]) == 1


class TestBenchmark:
    def test_summary(self, capsys):
        code = main(["benchmark", "--dgp", "ame-gauss", "--methods", "ame-lsif",
                     "--replications", "2", "--n", "300", "--seed", "5", "--oracle-nuisances",
                     "--n-jobs", "2"])
        assert code == 0
        summary = _stdout_json(capsys)
        assert summary["theta0"] == 1.0
        assert set(summary["methods"]) == {"ame-lsif", "oracle-aipw"}
        entry = summary["methods"]["ame-lsif"]
        assert len(entry["theta_hat"]) == 2
        assert 0.0 <= entry["coverage"] <= 1.0
        assert entry["rmse"] >= abs(entry["bias"])

    def test_reproducible(self, capsys):
        argv = ["benchmark", "--dgp", "ame-gauss", "--methods", "ame-lsif",
                "--replications", "2", "--n", "200", "--seed", "8"]
        main(argv)
        first = _stdout_json(capsys)
        main(argv)
        assert _stdout_json(capsys) == first

    def test_needs_something_to_run(self):
        assert main(["benchmark", "--dgp", "ame-gauss", "--replications", "1", "--n", "50"]) == 2

    def test_method_must_fit_process(self):
        assert main(["benchmark", "--dgp", "ame-gauss", "--methods", "ate-tsm",
                     "--replications", "1", "--n", "50"]) == 2

    def test_unknown_method(self):
        assert main(["benchmark", "--dgp", "ame-gauss", "--methods", "ame-forest",
                     "--replications", "1", "--n", "50"]) == 2


class TestSummarizeReplications:
    def test_single_replication_has_no_coverage(self):
        rows = [{"m": (1.2, 0.1, (1.0, 1.4))}]
        summary = summarize_replications(1.0, rows)
        assert summary["m"]["bias"] == pytest.approx(0.2)
        assert "coverage" not in summary["m"]

    def test_coverage(self):
        rows = [{"m": (1.2, 0.1, (1.0, 1.4))}, {"m": (2.0, 0.1, (1.8, 2.2))}]
        summary = summarize_replications(1.0, rows)
        assert summary["m"]["coverage"] == 0.5
        assert summary["m"]["rmse"] == pytest.approx(((0.04 + 1.0) / 2) ** 0.5)
