"""Shared fixtures; puts src/ on the import path like src/main.py does."""

import os
import sys

import numpy as np
import pytest

sys.path.insert(0, os.path.abspath(os.path.join(os.path.dirname(__file__), "..", "src")))

from scoreriesz.core import Dataset, RunConfig, TreatmentKind, make_rng  # noqa: E402
from scoreriesz.synth import DgpSpec, generate  # noqa: E402


@pytest.fixture
def rng():
    return make_rng(12345)


@pytest.fixture
def cfg():
    return RunConfig()


@pytest.fixture
def ate_data():
    dataset, bundle = generate(DgpSpec("ate-gauss"), 2000, make_rng(1))
    return dataset, bundle


@pytest.fixture
def ame_data():
    dataset, bundle = generate(DgpSpec("ame-gauss"), 2000, make_rng(2))
    return dataset, bundle


@pytest.fixture
def tiny_binary():
    return Dataset(outcomes=[1.0, 2.0, 3.0, 4.0],
                   treatments=[1.0, -1.0, 1.0, -1.0],
                   covariates=np.array([[0.1], [0.2], [0.3], [0.4]]),
                   treatment_kind=TreatmentKind.BINARY)
