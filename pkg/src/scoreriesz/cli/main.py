"""
Command-line front end.

Subcommands:
    gen        draw a synthetic dataset and write data.csv + oracle.json
    estimate   cross-fitted estimate of a dataset, EstimateReport JSON on stdout
    benchmark  replication study on a synthetic process, summary JSON on stdout

Diagnostics go to stderr through logging; stdout carries only JSON.
Exit codes: 0 success, 2 usage or validation error, 1 runtime failure.
"""

import argparse
import json
import logging
import os
import sys

import numpy as np
from joblib import Parallel, delayed

from ..core import (
    ConfigError,
    Dataset,
    DatasetError,
    RunConfig,
    TreatmentKind,
    load_dataset,
    make_rng,
    report_to_dict,
    save_dataset,
    save_report,
    spawn_seeds,
)
from ..dml import (
    EstimationError,
    Functional,
    METHODS,
    OracleOutcome,
    check_functional,
    cross_fit_estimate,
    get_recipe,
)
from ..synth import DgpKind, DgpSpec, SynthError, build_oracle, generate, read_oracle, write_oracle

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_RUNTIME = 1
EXIT_USAGE = 2

ORACLE_METHOD = "oracle-aipw"

# method whose functional the oracle-nuisance estimate targets, per process
ORACLE_FUNCTIONAL_METHOD = {
    DgpKind.ATE_GAUSS: "ate-tsm",
    DgpKind.AME_GAUSS: "ame-bridge",
    DgpKind.AME_BOUNDED: "ame-dsm",
    DgpKind.APE_GAUSS: "ape-tsm",
}

# command-line flag -> RunConfig field
CONFIG_FLAGS = (
    ("seed", int),
    ("folds", int),
    ("steps", int),
    ("batch_size", int),
    ("learning_rate", float),
    ("t_truncation", float),
    ("quadrature_points", int),
    ("lambda_kind", str),
    ("sigma_min", float),
    ("sigma_max", float),
    ("solver", str),
    ("model", str),
)


class ValidationError(Exception):
    """Exception raised when inputs are well formed but do not fit together."""
    pass


VALIDATION_ERRORS = (ValidationError, DatasetError, ConfigError, SynthError)


def _positive_int(text):
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected an integer, got '{text}'")
    if value < 1:
        raise argparse.ArgumentTypeError(f"expected an integer >= 1, got {value}")
    return value


def _method_list(text):
    methods = [m.strip() for m in text.split(",") if m.strip()]
    unknown = [m for m in methods if m not in METHODS]
    if unknown:
        raise argparse.ArgumentTypeError(
            f"unknown methods {', '.join(unknown)}; expected from {', '.join(METHODS)}")
    return methods


def build_parser():
    """Argument parser with the gen, estimate and benchmark subcommands."""
    parser = argparse.ArgumentParser(
        prog="scoreriesz",
        description="Riesz representers by score matching, inside cross-fitted estimators")
    parser.add_argument("--log-level", default="WARNING",
                        choices=["DEBUG", "INFO", "WARNING", "ERROR"])
    parser.add_argument("-v", "--verbose", action="store_true", help="same as --log-level INFO")
    commands = parser.add_subparsers(dest="command", required=True)

    gen = commands.add_parser("gen", help="generate a synthetic dataset")
    gen.add_argument("--dgp", required=True, choices=[k.value for k in DgpKind])
    gen.add_argument("--n", type=_positive_int, required=True)
    gen.add_argument("--seed", type=int, default=0)
    gen.add_argument("--out-dir", default=".")
    gen.add_argument("--dim-z", type=int, default=1)
    gen.add_argument("--mu", type=float, default=1.0)
    gen.add_argument("--pi", type=float, default=0.5)
    gen.set_defaults(handler=cmd_gen)

    estimate = commands.add_parser("estimate", help="cross-fitted estimate on a dataset")
    estimate.add_argument("--data", required=True)
    estimate.add_argument("--method", required=True, choices=METHODS)
    estimate.add_argument("--oracle", help="oracle.json written by gen")
    estimate.add_argument("--oracle-nuisances", action="store_true",
                          help="use the analytic representer and outcome of --oracle")
    estimate.add_argument("--config", help="JSON config; flags take precedence")
    estimate.add_argument("--out", help="also write the report to this path")
    estimate.add_argument("--policy-shift", type=float, default=None)
    estimate.add_argument("--bounded", action="store_true", default=None,
                          help="treatment supported on [-1, 1] (DSM reflection)")
    for name, kind in CONFIG_FLAGS:
        estimate.add_argument("--" + name.replace("_", "-"), type=kind, default=None)
    estimate.set_defaults(handler=cmd_estimate)

    bench = commands.add_parser("benchmark", help="replication study on a synthetic process")
    bench.add_argument("--dgp", required=True, choices=[k.value for k in DgpKind])
    bench.add_argument("--methods", type=_method_list, default=[])
    bench.add_argument("--replications", type=_positive_int, required=True)
    bench.add_argument("--n", type=_positive_int, required=True)
    bench.add_argument("--seed", type=int, default=0)
    bench.add_argument("--oracle-nuisances", action="store_true")
    bench.add_argument("--n-jobs", type=_positive_int, default=1)
    bench.add_argument("--config", help="JSON config for the estimators")
    bench.add_argument("--dim-z", type=int, default=1)
    bench.add_argument("--mu", type=float, default=1.0)
    bench.add_argument("--pi", type=float, default=0.5)
    bench.set_defaults(handler=cmd_benchmark)
    return parser


def _emit(payload):
    json.dump(payload, sys.stdout, indent=2)
    sys.stdout.write("\n")
    sys.stdout.flush()


def _process_spec(args):
    return DgpSpec(kind=args.dgp, dim_z=args.dim_z, mu=args.mu, pi=args.pi)


def _oracle_nuisances(spec):
    bundle = build_oracle(spec)
    return bundle.alpha0, OracleOutcome(bundle.gamma0, bundle.d_gamma0)


def cmd_gen(args):
    """Write DIR/data.csv and DIR/oracle.json; identical bytes for identical flags."""
    spec = _process_spec(args)
    try:
        os.makedirs(args.out_dir, exist_ok=True)
    except OSError as e:
        raise ValidationError(f"Failed to create output directory {args.out_dir}: {e}") from e
    dataset, bundle = generate(spec, args.n, make_rng(args.seed))
    data_path = os.path.join(args.out_dir, "data.csv")
    oracle_path = os.path.join(args.out_dir, "oracle.json")
    save_dataset(dataset, data_path)
    write_oracle(spec, oracle_path, seed=args.seed)
    logger.info("Wrote %s and %s (theta0=%g)", data_path, oracle_path, bundle.theta0)
    return EXIT_OK


def _run_config(args):
    base = RunConfig.from_json(args.config) if args.config else RunConfig()
    overrides = {name: getattr(args, name, None) for name, _ in CONFIG_FLAGS}
    return base.merged(**overrides)


def _load_dataset(path, spec):
    """
    Load a dataset. The treatment schema comes from the oracle spec when known,
    otherwise from the data: a column coded only -1/+1 is binary.
    """
    if spec is not None:
        return load_dataset(path, spec.treatment_kind)
    dataset = load_dataset(path, TreatmentKind.CONTINUOUS)
    if np.all(np.isin(dataset.treatments, (-1.0, 1.0))):
        dataset = Dataset(outcomes=dataset.outcomes, treatments=dataset.treatments,
                          covariates=dataset.covariates, treatment_kind=TreatmentKind.BINARY)
    return dataset


def cmd_estimate(args):
    """Cross-fitted estimate; EstimateReport JSON on stdout."""
    cfg = _run_config(args)
    spec = None
    if args.oracle:
        spec, _ = read_oracle(args.oracle)
    if args.oracle_nuisances and spec is None:
        raise ValidationError("--oracle-nuisances needs --oracle")
    dataset = _load_dataset(args.data, spec)

    try:
        kind, _ = get_recipe(args.method)
        check_functional(kind, dataset)
    except EstimationError as e:
        raise ValidationError(f"Method {args.method} does not fit {args.data}: {e}") from e

    options = {}
    if args.policy_shift is not None:
        options["policy_shift"] = args.policy_shift
    elif spec is not None and kind is Functional.APE:
        options["policy_shift"] = spec.mu
    bounded = args.bounded if args.bounded is not None else (spec.bounded if spec else False)
    options["bounded"] = bool(bounded)

    nuisances = _oracle_nuisances(spec) if args.oracle_nuisances else None
    report = cross_fit_estimate(dataset, args.method, cfg, make_rng(cfg.seed),
                                nuisances=nuisances, options=options)
    payload = report_to_dict(report)
    if args.out:
        save_report(report, args.out)
    _emit(payload)
    return EXIT_OK


def _replicate(r, seeds, spec, methods, n, cfg, oracle_method):
    """
    One replication: a fresh dataset, then every method on it. Methods share
    the estimation stream seed so their errors are paired.
    """
    data_seed, estimate_seed = seeds.spawn(2)
    dataset, _ = generate(spec, n, make_rng(data_seed))
    options = {"policy_shift": spec.mu, "bounded": spec.bounded}
    estimates = {}
    for method in methods:
        report = cross_fit_estimate(dataset, method, cfg, make_rng(estimate_seed),
                                    options=options)
        estimates[method] = (report.theta_hat, report.se, report.ci_95)
    if oracle_method is not None:
        report = cross_fit_estimate(dataset, oracle_method, cfg, make_rng(estimate_seed),
                                    nuisances=_oracle_nuisances(spec), options=options)
        estimates[ORACLE_METHOD] = (report.theta_hat, report.se, report.ci_95)
    logger.info("Replication %d done", r)
    return estimates


def summarize_replications(theta0, rows):
    """
    Per-method bias, RMSE and mean standard error over replications, plus the
    empirical 95% interval coverage when there is more than one replication.
    """
    summary = {}
    for method in rows[0]:
        theta = np.array([row[method][0] for row in rows])
        se = np.array([row[method][1] for row in rows])
        lower = np.array([row[method][2][0] for row in rows])
        upper = np.array([row[method][2][1] for row in rows])
        entry = {
            "bias": float(np.mean(theta - theta0)),
            "rmse": float(np.sqrt(np.mean((theta - theta0) ** 2))),
            "mean_se": float(np.mean(se)),
            "theta_hat": [float(v) for v in theta],
        }
        if len(rows) > 1:
            entry["coverage"] = float(np.mean((lower <= theta0) & (theta0 <= upper)))
        summary[method] = entry
    return summary


def cmd_benchmark(args):
    """Replication study; summary JSON keyed by method on stdout."""
    spec = _process_spec(args)
    if not args.methods and not args.oracle_nuisances:
        raise ValidationError("benchmark needs --methods, --oracle-nuisances or both")
    cfg = RunConfig.from_json(args.config) if args.config else RunConfig()
    cfg = cfg.merged(n_jobs=1)
    dataset_kind = spec.treatment_kind
    for method in args.methods:
        kind, _ = get_recipe(method)
        if (kind is Functional.ATE) != (dataset_kind is TreatmentKind.BINARY):
            raise ValidationError(f"Method {method} does not fit process {spec.kind.value}")
    oracle_method = ORACLE_FUNCTIONAL_METHOD[spec.kind] if args.oracle_nuisances else None

    theta0 = build_oracle(spec).theta0
    seeds = spawn_seeds(args.seed, args.replications)
    rows = Parallel(n_jobs=args.n_jobs, backend="threading")(
        delayed(_replicate)(r, seeds[r], spec, args.methods, args.n, cfg, oracle_method)
        for r in range(args.replications))

    _emit({
        "dgp": spec.kind.value,
        "theta0": float(theta0),
        "n": args.n,
        "replications": args.replications,
        "seed": args.seed,
        "methods": summarize_replications(theta0, rows),
    })
    return EXIT_OK


def _configure_logging(args):
    level = "INFO" if args.verbose and args.log_level == "WARNING" else args.log_level
    logging.basicConfig(stream=sys.stderr, level=getattr(logging, level),
                        format="%(asctime)s %(levelname)s %(name)s: %(message)s")


def main(argv=None):
    """Run one subcommand and return its exit code."""
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return EXIT_OK if e.code in (0, None) else EXIT_USAGE
    _configure_logging(args)

    try:
        return args.handler(args)
    except VALIDATION_ERRORS as e:
        logger.error("%s", e)
        return EXIT_USAGE
    except Exception as e:
        logger.error("%s failed: %s", args.command, e)
        logger.debug("Traceback", exc_info=True)
        return EXIT_RUNTIME
