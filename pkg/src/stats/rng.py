"""Keyed random streams for resampling.

Resample ``r`` under ``seed`` always draws from the PCG64 stream seeded by
the entropy pair (seed, r), so results do not depend on how resamples are
scheduled across threads.
"""
import numpy as np

from src.exceptions import InvalidArgument

SEED_LIMIT = 1 << 64


def check_seed(seed: int) -> int:
    seed = int(seed)
    if not 0 <= seed < SEED_LIMIT:
        raise InvalidArgument(f"seed must be an unsigned 64-bit integer, got {seed}")
    return seed


def keyed_rng(seed: int, *key: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence([check_seed(seed), *key])))


def resample_indices(seed: int, index: int, n: int) -> np.ndarray:
    """Row indices of resample ``index``: n draws with replacement from 0..n-1."""
    return keyed_rng(seed, index).integers(0, n, size=n)
