"""
Dataset container for observed (Y, D, Z) tuples.

This module provides the immutable Dataset class used by every estimator,
together with the errors raised when observed data violate its contract.
"""

from dataclasses import dataclass
from enum import Enum

import numpy as np


class DatasetError(Exception):
    """Exception raised when observed data violate the dataset contract."""
    pass


class DatasetParseError(DatasetError):
    """Exception raised for malformed rows in a dataset file."""

    def __init__(self, message, line=None):
        super().__init__(message)
        self.line = line


class TreatmentKind(str, Enum):
    """Role of the treatment column."""

    BINARY = "binary"
    CONTINUOUS = "continuous"


def _frozen(values, ndim):
    array = np.array(values, dtype=np.float64, copy=True)
    if ndim == 2 and array.ndim == 1:
        array = array.reshape(-1, 1) if array.size else array.reshape(0, 0)
    if array.ndim != ndim:
        raise DatasetError(f"Expected a {ndim}-d array, got shape {array.shape}")
    array.setflags(write=False)
    return array


@dataclass(frozen=True, eq=False)
class Dataset:
    """
    Observed outcomes, treatments and covariates.

    Binary treatments are coded +1 / -1. Covariates are an (n, d_z) matrix;
    d_z may be zero.
    """

    outcomes: np.ndarray
    treatments: np.ndarray
    covariates: np.ndarray
    treatment_kind: TreatmentKind

    def __post_init__(self):
        kind = TreatmentKind(self.treatment_kind)
        y = _frozen(self.outcomes, 1)
        d = _frozen(self.treatments, 1)
        covariates = np.asarray(self.covariates, dtype=np.float64)
        if covariates.ndim == 2 and covariates.shape[1] == 0:
            z = np.zeros((len(d), 0))
            z.setflags(write=False)
        else:
            z = _frozen(covariates, 2)

        n = len(y)
        if n < 1:
            raise DatasetError("A dataset needs at least one row")
        if len(d) != n or z.shape[0] != n:
            raise DatasetError(
                f"Column lengths differ: y={n}, d={len(d)}, z={z.shape[0]}")
        for name, column in (("y", y), ("d", d), ("z", z)):
            if not np.all(np.isfinite(column)):
                raise DatasetError(f"Column {name} contains non-finite values")
        if kind is TreatmentKind.BINARY and not np.all(np.isin(d, (-1.0, 1.0))):
            bad = d[~np.isin(d, (-1.0, 1.0))][0]
            raise DatasetError(
                f"Binary treatment must be coded -1/+1, found d={bad:g}")

        object.__setattr__(self, "outcomes", y)
        object.__setattr__(self, "treatments", d)
        object.__setattr__(self, "covariates", z)
        object.__setattr__(self, "treatment_kind", kind)

    @property
    def n(self):
        return len(self.outcomes)

    @property
    def dim_z(self):
        return self.covariates.shape[1]

    @property
    def is_binary(self):
        return self.treatment_kind is TreatmentKind.BINARY

    @property
    def regressors(self):
        """Regressor matrix X = (D, Z) of shape (n, 1 + d_z)."""
        return np.column_stack([self.treatments, self.covariates])

    def subset(self, indices):
        """Return the rows at `indices` as a new Dataset."""
        indices = np.asarray(indices)
        return Dataset(
            outcomes=self.outcomes[indices],
            treatments=self.treatments[indices],
            covariates=self.covariates[indices],
            treatment_kind=self.treatment_kind,
        )

    def arm(self, level):
        """Covariates of the rows with D == level (binary datasets only)."""
        if not self.is_binary:
            raise DatasetError("Treatment arms are only defined for binary treatments")
        return self.covariates[self.treatments == level]

    def treated_share(self):
        """Sample frequency of D == 1."""
        if not self.is_binary:
            raise DatasetError("Treated share is only defined for binary treatments")
        return float(np.mean(self.treatments == 1.0))
