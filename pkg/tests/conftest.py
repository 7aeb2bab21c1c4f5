import os
import sys

import numpy as np
import pytest

# Add the project root directory to Python path
sys.path.insert(0, os.path.abspath(os.path.join(os.path.dirname(__file__), '..')))

from src.datasets import load_fixture
from src.lattice import CoalitionTable, TaskMatrix

UNIVERSE = ("P", "T", "M", "SR", "R")


@pytest.fixture(scope="session")
def table_8b() -> CoalitionTable:
    return load_fixture("hotpotqa_8b")


@pytest.fixture(scope="session")
def table_70b() -> CoalitionTable:
    return load_fixture("hotpotqa_70b")


@pytest.fixture
def additive_table() -> CoalitionTable:
    """f(S) = 1 + sum of member weights; no interactions at all."""
    weights = np.array([0.5, 2.0, -1.0])
    masks = np.arange(8)
    values = 1.0 + np.array([weights[[i for i in range(3) if m >> i & 1]].sum() for m in masks])
    return CoalitionTable(("A", "B", "C"), values)


@pytest.fixture
def task_matrix_8b(table_8b) -> TaskMatrix:
    """40 synthetic tasks scattered around the 8B table."""
    rng = np.random.default_rng(7)
    noise = rng.normal(0.0, 0.05, size=(40, table_8b.size))
    return TaskMatrix(table_8b.universe, [f"q{i}" for i in range(40)], table_8b.values + noise)
