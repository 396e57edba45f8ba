"""
Core module shared by all other modules.

This module contains the dataset container, run configuration, seeded random
streams and the CSV/JSON file formats.
"""

from .dataset import (
    Dataset,
    TreatmentKind,
    DatasetError,
    DatasetParseError,
)

from .config import (
    RunConfig,
    LambdaKind,
    ConfigError,
)

from .rng import (
    make_rng,
    split_rng,
    spawn_seeds,
    derive_seed,
)

from .io import (
    load_dataset,
    save_dataset,
    save_report,
    report_to_dict,
    ReportError,
)

__all__ = [
    "Dataset",
    "TreatmentKind",
    "DatasetError",
    "DatasetParseError",
    "RunConfig",
    "LambdaKind",
    "ConfigError",
    "make_rng",
    "split_rng",
    "spawn_seeds",
    "derive_seed",
    "load_dataset",
    "save_dataset",
    "save_report",
    "report_to_dict",
    "ReportError",
]
