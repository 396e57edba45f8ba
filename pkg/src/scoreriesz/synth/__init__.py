"""
Synth module with synthetic data-generating processes.

This module contains the process specifications, data generation, and the
analytic oracles (targets, representers, propensities, scores) used to verify
every estimator.
"""

from .dgp import (
    SynthError,
    DgpKind,
    DgpSpec,
    OracleBundle,
    OUTCOME_TERMS,
    generate,
    oracle_theta,
    build_oracle,
    write_oracle,
    read_oracle
)

__all__ = [
    "SynthError",
    "DgpKind",
    "DgpSpec",
    "OracleBundle",
    "OUTCOME_TERMS",
    "generate",
    "oracle_theta",
    "build_oracle",
    "write_oracle",
    "read_oracle"
]
