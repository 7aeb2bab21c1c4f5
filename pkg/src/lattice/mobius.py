"""Möbius (Harsanyi) transform of a coalition table and its inverse.

dividend(S) = sum over W ⊆ S of (-1)^(|S|-|W|) f(W), so that
f(S) = sum over W ⊆ S of dividend(W).
"""
import logging
from typing import List, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict

from src.lattice.coalition import (
    CoalitionKey,
    CoalitionTable,
    ComponentSet,
    Universe,
    label_of,
    popcounts,
    resolve_mask,
)
from src.lattice.task_matrix import submasks

logger = logging.getLogger(__name__)


def _subset_transform(array: np.ndarray, k: int, sign: int) -> np.ndarray:
    # In-place butterfly over each bit: index = high * 2^(i+1) + bit * 2^i + low
    for bit in range(k):
        view = array.reshape(-1, 2, 1 << bit)
        if sign < 0:
            view[:, 1, :] -= view[:, 0, :]
        else:
            view[:, 1, :] += view[:, 0, :]
    return array


class OrderMass(BaseModel):
    model_config = ConfigDict(frozen=True)

    order: int
    count: int
    total: float
    abs_total: float


class Dividend(BaseModel):
    model_config = ConfigDict(frozen=True)

    coalition: str
    order: int
    value: float


class HarsanyiSpectrum:
    """All 2^k dividends of a complete table, indexed by mask."""

    def __init__(self, universe: Universe, dividends: np.ndarray):
        self.universe = universe
        dividends = np.array(dividends, dtype=float)
        dividends.setflags(write=False)
        self._dividends = dividends

    @property
    def k(self) -> int:
        return len(self.universe)

    @property
    def dividends(self) -> np.ndarray:
        return self._dividends

    def dividend(self, key: CoalitionKey) -> float:
        return float(self._dividends[resolve_mask(self.universe, key)])

    def order_summary(self) -> List[OrderMass]:
        """Sum and absolute mass of dividends at each interaction order."""
        sizes = popcounts(self.k)
        summary = []
        for order in range(self.k + 1):
            chunk = self._dividends[sizes == order]
            summary.append(
                OrderMass(
                    order=order,
                    count=int(chunk.size),
                    total=float(chunk.sum()),
                    abs_total=float(np.abs(chunk).sum()),
                )
            )
        return summary

    def items(self) -> List[Tuple[str, float]]:
        return [(label_of(self.universe, mask), float(value)) for mask, value in enumerate(self._dividends)]

    def top(self, n: int = 10, min_order: int = 2) -> List[Dividend]:
        """Largest dividends by absolute value; ties go to the smaller mask."""
        sizes = popcounts(self.k)
        masks = np.flatnonzero(sizes >= min_order)
        ranked: List[Tuple[float, int]] = sorted(
            ((-abs(float(self._dividends[m])), int(m)) for m in masks)
        )[:n]
        return [
            Dividend(
                coalition=ComponentSet(universe=self.universe, mask=mask).label,
                order=int(sizes[mask]),
                value=float(self._dividends[mask]),
            )
            for _, mask in ranked
        ]


def mobius_transform(table: CoalitionTable) -> HarsanyiSpectrum:
    table.require_complete()
    dividends = _subset_transform(np.array(table.values, dtype=float), table.k, sign=-1)
    return HarsanyiSpectrum(table.universe, dividends)


def reconstruct(spectrum: HarsanyiSpectrum) -> CoalitionTable:
    """Zeta transform: rebuild the source table from its dividends."""
    values = _subset_transform(np.array(spectrum.dividends, dtype=float), spectrum.k, sign=+1)
    return CoalitionTable(spectrum.universe, values)


def subset_signs(mask: int) -> Tuple[np.ndarray, np.ndarray]:
    """Submasks of ``mask`` and the inclusion-exclusion sign of each."""
    subs = submasks(mask)
    size = bin(mask).count("1")
    sub_sizes = np.array([bin(int(s)).count("1") for s in subs])
    signs = np.where((size - sub_sizes) % 2 == 0, 1.0, -1.0)
    return subs, signs


def coalition_dividend(values: np.ndarray, mask: int) -> np.ndarray:
    """Dividend of one coalition using only its sub-lattice.

    ``values`` may be a single value row or a units x coalitions block; the
    result has one entry per row.
    """
    subs, signs = subset_signs(mask)
    return np.asarray(values)[..., subs] @ signs


def interaction_order_summary(spectrum: HarsanyiSpectrum) -> List[OrderMass]:
    return spectrum.order_summary()
