"""Shared fixtures: the canonical worked example and random helpers."""

import numpy as np
import pytest

from prosparsity import GemmProblem, SpikeMatrix, TileConfig, WeightMatrix

# Hand-worked 6x4 tile used throughout the suite.  Derived quantities
# (frozen by hand, independently of the implementation):
#   popcounts [2, 2, 3, 1, 3, 3]
#   prefixes  [3, none, 1, none, 1, 4]
#   patterns  [1000, 1001, 0010, 0010, 0100, 0000]
#   order     [3, 0, 1, 2, 4, 5]
CANONICAL_ROWS = ["1010", "1001", "1011", "0010", "1101", "1101"]
CANONICAL_PREFIX = [3, -1, 1, -1, 1, 4]
CANONICAL_PATTERNS = ["1000", "1001", "0010", "0010", "0100", "0000"]
CANONICAL_ORDER = [3, 0, 1, 2, 4, 5]
CANONICAL_POPCOUNTS = [2, 2, 3, 1, 3, 3]


@pytest.fixture
def canonical():
    return SpikeMatrix.from_rows(CANONICAL_ROWS)


@pytest.fixture
def canonical_weights():
    return WeightMatrix.from_array(np.array([[1], [2], [3], [4]], dtype=np.int8))


@pytest.fixture
def canonical_problem(canonical, canonical_weights):
    return GemmProblem(
        spikes=canonical, weights=canonical_weights, tile=TileConfig(m=6, n=128, k=4)
    )


def random_spikes(rng: np.random.Generator, m: int, k: int, density: float) -> SpikeMatrix:
    return SpikeMatrix.from_dense(rng.random((m, k)) < density)


def random_int8_weights(rng: np.random.Generator, k: int, n: int) -> WeightMatrix:
    return WeightMatrix.from_array(
        rng.integers(-64, 64, size=(k, n), dtype=np.int64).astype(np.int8)
    )
