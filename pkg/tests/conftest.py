"""Shared test fixtures: deterministic synthetic benchmarks."""

import numpy as np
import pytest

from fmtree.data import Dataset, Project

BENCHMARK_SEED = 2014
BENCHMARK_SIZE = 84
BENCHMARK_TRAIN = 59


def piecewise_dataset(n: int = BENCHMARK_SIZE, seed: int = BENCHMARK_SEED) -> Dataset:
    """Effort is piecewise-linear in size (slope break at 220 UCP) plus 3% noise.

    A single global linear or log-linear fit cannot follow both regimes, while
    a tree that can separate them recovers each side almost exactly.  The
    implied PH/UCP ratio drifts far from 20 on both ends, so the fixed-ratio
    baseline is systematically biased.
    """
    rng = np.random.default_rng(seed)
    size = rng.uniform(60.0, 420.0, n)
    productivity = rng.uniform(10.0, 35.0, n)
    complexity = rng.integers(1, 6, n).astype(float)
    low = size <= 220.0
    effort = np.where(
        low,
        11.0 * size + 150.0 * complexity,
        34.0 * size - 5060.0 + 150.0 * complexity,
    )
    effort = effort * np.exp(rng.normal(0.0, 0.03, n))
    projects = tuple(
        Project(f"p{i + 1:03d}", float(size[i]), float(productivity[i]),
                float(complexity[i]), float(effort[i]))
        for i in range(n)
    )
    return Dataset(projects, "synthetic")


def linear_dataset(n: int = 80, seed: int = 11) -> Dataset:
    """Noise-free effort, exactly linear in the three raw features."""
    rng = np.random.default_rng(seed)
    size = rng.uniform(40.0, 300.0, n)
    productivity = rng.uniform(10.0, 35.0, n)
    complexity = rng.integers(1, 6, n).astype(float)
    effort = 25.0 + 12.0 * size + 6.0 * productivity + 90.0 * complexity
    projects = tuple(
        Project(f"lin{i:03d}", float(size[i]), float(productivity[i]),
                float(complexity[i]), float(effort[i]))
        for i in range(n)
    )
    return Dataset(projects, "synthetic")


@pytest.fixture
def benchmark() -> Dataset:
    return piecewise_dataset()
