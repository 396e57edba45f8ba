"""
File formats for datasets and reports.

Datasets are CSV files with header `y,d,z1..zK`; reports are JSON documents.
"""

import json
import logging
import math
import os
import re

import numpy as np
import pandas as pd

from .dataset import Dataset, DatasetError, DatasetParseError, TreatmentKind

logger = logging.getLogger(__name__)


class ReportError(Exception):
    """Exception raised when a report cannot be serialized or written."""
    pass


def _expected_header(columns):
    if len(columns) < 2 or list(columns[:2]) != ["y", "d"]:
        return False
    return list(columns[2:]) == [f"z{j + 1}" for j in range(len(columns) - 2)]


def load_dataset(path, schema):
    """
    Load a dataset from CSV.

    Args:
        path: CSV file with header `y,d,z1..zK`
        schema: TreatmentKind (or its string value) the file must satisfy

    Returns:
        Dataset
    """
    kind = TreatmentKind(schema)
    if not os.path.isfile(path):
        raise DatasetError(f"Dataset file not found: {path}")

    try:
        frame = pd.read_csv(path, dtype=str, skipinitialspace=True,
                            keep_default_na=False)
    except pd.errors.ParserError as e:
        match = re.search(r"line (\d+)", str(e))
        line = int(match.group(1)) if match else None
        raise DatasetParseError(f"Failed to parse {path}: {e}", line=line) from e
    except pd.errors.EmptyDataError as e:
        raise DatasetParseError(f"Dataset file is empty: {path}", line=1) from e

    if not _expected_header(list(frame.columns)):
        raise DatasetParseError(
            f"Bad header in {path}: expected y,d,z1..zK, got {','.join(frame.columns)}",
            line=1)

    numeric = frame.apply(pd.to_numeric, errors="coerce")
    bad_rows = np.flatnonzero(numeric.isna().any(axis=1).to_numpy())
    if bad_rows.size:
        row = int(bad_rows[0])
        # header is line 1
        line = row + 2
        raise DatasetParseError(
            f"Malformed row at line {line} of {path}: {','.join(frame.iloc[row])}",
            line=line)

    # re-read numerically so values round-trip exactly
    values = pd.read_csv(path, float_precision="round_trip", skipinitialspace=True)
    z_columns = [c for c in values.columns if c.startswith("z")]
    dataset = Dataset(
        outcomes=values["y"].to_numpy(dtype=np.float64),
        treatments=values["d"].to_numpy(dtype=np.float64),
        covariates=values[z_columns].to_numpy(dtype=np.float64),
        treatment_kind=kind,
    )
    logger.info("Loaded %d rows (%s treatment, d_z=%d) from %s",
                dataset.n, kind.value, dataset.dim_z, path)
    return dataset


def save_dataset(dataset, path):
    """Write a dataset as CSV with header `y,d,z1..zK`."""
    columns = {"y": dataset.outcomes, "d": dataset.treatments}
    for j in range(dataset.dim_z):
        columns[f"z{j + 1}"] = dataset.covariates[:, j]
    try:
        pd.DataFrame(columns).to_csv(path, index=False, float_format="%.17g")
    except OSError as e:
        raise DatasetError(f"Failed to write dataset {path}: {e}") from e


def report_to_dict(report):
    """
    Serializable view of an EstimateReport.

    Raises:
        ReportError: if any reported number is not finite
    """
    values = {
        "theta_hat": report.theta_hat,
        "se": report.se,
        "ci_lower": report.ci_95[0],
        "ci_upper": report.ci_95[1],
        "variance_hat": report.variance_hat,
    }
    for name, value in values.items():
        if not math.isfinite(value):
            raise ReportError(f"Refusing to serialize non-finite {name}={value}")
    payload = {k: float(v) for k, v in values.items()}
    payload.update({
        "n": int(report.n),
        "folds": [dict(diag) for diag in report.folds],
        "method": str(report.method),
        "warnings": dict(report.warnings),
    })
    return payload


def save_report(report, path):
    """Write an EstimateReport as a JSON document."""
    payload = report_to_dict(report)
    try:
        with open(path, "w", encoding="utf-8") as handle:
            json.dump(payload, handle, indent=2)
            handle.write("\n")
    except OSError as e:
        raise ReportError(f"Failed to write report {path}: {e}") from e
