"""Exact Shapley values over a complete coalition table.

Two independent formulas are available and must agree:
  - "weights": phi_i = sum over S not containing i of
    |S|! (k-|S|-1)! / k! * (f(S ∪ {i}) - f(S)), the permutation average
    collapsed onto coalitions;
  - "dividends": phi_i = sum over S containing i of dividend(S) / |S|.
"""
import logging
import math
import threading
from typing import Dict, Optional

import numpy as np
from cachetools import LRUCache, cached
from pydantic import BaseModel, ConfigDict

from src.exceptions import AllZero, InvalidArgument
from src.lattice.coalition import CoalitionTable, Universe, popcounts
from src.lattice.mobius import HarsanyiSpectrum, mobius_transform

logger = logging.getLogger(__name__)

METHODS = ("weights", "dividends")


class ShapleyReport(BaseModel):
    model_config = ConfigDict(frozen=True)

    universe: Universe
    phi: Dict[str, float]
    efficiency_gap: float
    abs_mass_share: Optional[Dict[str, float]] = None
    method: str = "weights"
    empty_value: float = 0.0
    full_value: float = 0.0


@cached(cache=LRUCache(maxsize=32), lock=threading.Lock())
def _coalition_weights(k: int) -> np.ndarray:
    # Weight of a coalition of size s that excludes the player: 1 / (k * C(k-1, s))
    sizes = popcounts(k)
    table = np.array([1.0 / (k * math.comb(k - 1, s)) if s < k else 0.0 for s in range(k + 1)])
    weights = table[sizes]
    weights.setflags(write=False)
    return weights


def _shapley_by_weights(table: CoalitionTable) -> np.ndarray:
    k = table.k
    values = table.values
    masks = np.arange(table.size, dtype=np.int64)
    weights = _coalition_weights(k) if k else np.zeros(1)
    phi = np.zeros(k)
    for i in range(k):
        bit = 1 << i
        without = masks[(masks & bit) == 0]
        phi[i] = np.sum(weights[without] * (values[without | bit] - values[without]))
    return phi


def _shapley_by_dividends(spectrum: HarsanyiSpectrum) -> np.ndarray:
    k = spectrum.k
    sizes = popcounts(k)
    masks = np.arange(1 << k, dtype=np.int64)
    dividends = spectrum.dividends
    phi = np.zeros(k)
    for i in range(k):
        members = masks[((masks >> i) & 1) == 1]
        phi[i] = np.sum(dividends[members] / sizes[members])
    return phi


def _mass_share(universe: Universe, phi: np.ndarray) -> Dict[str, float]:
    mass = np.abs(phi)
    total = mass.sum()
    if total == 0:
        raise AllZero()
    return {name: float(m / total) for name, m in zip(universe, mass)}


def shapley(table: CoalitionTable, method: str = "weights") -> ShapleyReport:
    """Exact Shapley decomposition of f(N) - f(∅)."""
    if method not in METHODS:
        raise InvalidArgument(f"unknown Shapley method {method!r}; choose from {METHODS}")
    table.require_complete()
    if method == "weights":
        phi = _shapley_by_weights(table)
    else:
        phi = _shapley_by_dividends(mobius_transform(table))
    empty_value = float(table.values[0])
    full_value = float(table.values[-1])
    gap = float(phi.sum() - (full_value - empty_value))
    try:
        share = _mass_share(table.universe, phi)
    except AllZero:
        share = None
    logger.debug(f"Shapley ({method}) over {table.k} components, efficiency gap {gap:.3e}")
    return ShapleyReport(
        universe=table.universe,
        phi={name: float(value) for name, value in zip(table.universe, phi)},
        efficiency_gap=gap,
        abs_mass_share=share,
        method=method,
        empty_value=empty_value,
        full_value=full_value,
    )


def abs_mass_share(report: ShapleyReport) -> Dict[str, float]:
    """Each component's share of the total absolute Shapley mass."""
    return _mass_share(report.universe, np.array([report.phi[name] for name in report.universe]))
