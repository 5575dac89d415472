"""Shared fixtures.

The synthetic datasets and the full benchmark report are expensive
enough to build once per session; every test that needs them shares
these instances and must not mutate them.
"""

import numpy as np
import pytest

from cyclelife import kernels
from cyclelife.data import DEFAULT_GRID, generate_synthetic
from cyclelife.evaluation import run_benchmark
from cyclelife.models import MODEL_KINDS, RegressorSpec


@pytest.fixture(scope="session", autouse=True)
def _warm_kernels():
    # Compile (or load the cached) jitted kernels before any timed test.
    kernels.warmup()


@pytest.fixture(scope="session")
def small_dataset():
    """16 synthetic cells on the default grid; enough for feature tests."""
    return generate_synthetic(16, DEFAULT_GRID, 7)


@pytest.fixture(scope="session")
def acceptance_dataset():
    """The 124-cell seed-42 population used by the end-to-end criteria."""
    return generate_synthetic(124, DEFAULT_GRID, 42)


@pytest.fixture(scope="session")
def acceptance_report(acceptance_dataset):
    """Full 14-model x 3-group x 5-repeat benchmark, single worker."""
    specs = [RegressorSpec(kind, seed=7) for kind in MODEL_KINDS]
    return run_benchmark(
        acceptance_dataset,
        specs,
        groups=("full", "discharge", "variance"),
        repeats=5,
        jobs=1,
    )


@pytest.fixture()
def rng():
    return np.random.default_rng(0)
