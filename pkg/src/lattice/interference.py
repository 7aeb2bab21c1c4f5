"""Marginal gains and cross-component interference.

Interference is the event that adding a component to a coalition strictly
lowers its value: f(C ∪ {s}) < f(C).
"""
import logging
from typing import List, Optional

import numpy as np
from pydantic import BaseModel, ConfigDict

from src.config.config import TIE_TOLERANCE
from src.exceptions import InvalidArgument, MemberAlreadyPresent, MissingCoalition
from src.lattice.coalition import (
    CoalitionTable,
    ComponentSet,
    component_index,
    label_of,
    popcounts,
    require_same_universe,
)

logger = logging.getLogger(__name__)


class MarginalRecord(BaseModel):
    model_config = ConfigDict(frozen=True)

    context: str
    component: str
    value: float


class InterferenceSummary(BaseModel):
    model_config = ConfigDict(frozen=True)

    n_pairs: int
    n_interference: int
    rate: float
    pairs: List[MarginalRecord]


class PartitionSummary(BaseModel):
    model_config = ConfigDict(frozen=True)

    component: str
    with_count: int
    with_mean: Optional[float] = None
    with_min: Optional[float] = None
    with_max: Optional[float] = None
    without_count: int
    without_mean: Optional[float] = None
    without_min: Optional[float] = None
    without_max: Optional[float] = None


class DegradationStep(BaseModel):
    model_config = ConfigDict(frozen=True)

    added: int
    count: int
    mean_value: float
    relative_change: Optional[float] = None


class DegradationProfile(BaseModel):
    model_config = ConfigDict(frozen=True)

    base: str
    base_value: float
    steps: List[DegradationStep]


def marginal(table: CoalitionTable, coalition: ComponentSet, component: str) -> float:
    """f(S ∪ {i}) - f(S)."""
    require_same_universe(coalition.universe, table.universe)
    bit = 1 << component_index(table.universe, component)
    if coalition.mask & bit:
        raise MemberAlreadyPresent(component)
    for mask in (coalition.mask, coalition.mask | bit):
        if not table.present[mask]:
            raise MissingCoalition(mask)
    return float(table.values[coalition.mask | bit] - table.values[coalition.mask])


def marginals(table: CoalitionTable) -> List[MarginalRecord]:
    """Every (C, s) pair with s outside C whose endpoints are both present,
    ordered by context mask then component."""
    records = []
    masks = np.flatnonzero(table.present)
    for mask in masks:
        for i, name in enumerate(table.universe):
            bit = 1 << i
            if mask & bit or not table.present[mask | bit]:
                continue
            records.append(
                MarginalRecord(
                    context=label_of(table.universe, int(mask)),
                    component=name,
                    value=float(table.values[mask | bit] - table.values[mask]),
                )
            )
    return records


def interference_pairs(table: CoalitionTable, tolerance: float = TIE_TOLERANCE) -> InterferenceSummary:
    records = marginals(table)
    harmful = sorted((r for r in records if r.value < -tolerance), key=lambda r: r.value)
    rate = len(harmful) / len(records) if records else 0.0
    logger.info(f"Interference in {len(harmful)} of {len(records)} (C, s) pairs")
    return InterferenceSummary(n_pairs=len(records), n_interference=len(harmful), rate=rate, pairs=harmful)


def _describe(values: np.ndarray):
    if values.size == 0:
        return None, None, None
    return float(values.mean()), float(values.min()), float(values.max())


def partition_by_component(table: CoalitionTable, component: str) -> PartitionSummary:
    """Split present coalitions by whether they contain ``component``."""
    bit = 1 << component_index(table.universe, component)
    masks = np.flatnonzero(table.present)
    has = (masks & bit) != 0
    with_values = table.values[masks[has]]
    without_values = table.values[masks[~has]]
    w_mean, w_min, w_max = _describe(with_values)
    wo_mean, wo_min, wo_max = _describe(without_values)
    return PartitionSummary(
        component=component,
        with_count=int(with_values.size),
        with_mean=w_mean,
        with_min=w_min,
        with_max=w_max,
        without_count=int(without_values.size),
        without_mean=wo_mean,
        without_min=wo_min,
        without_max=wo_max,
    )


def degradation_profile(table: CoalitionTable, base: ComponentSet) -> DegradationProfile:
    """Mean value of supersets of ``base`` grouped by how many components
    were added, relative to f(base)."""
    require_same_universe(base.universe, table.universe)
    base_value = table.value(base)
    sizes = popcounts(table.k)
    masks = np.flatnonzero(table.present)
    supersets = masks[((masks & base.mask) == base.mask) & (masks != base.mask)]
    steps = []
    for added in range(1, table.k - base.size + 1):
        chosen = supersets[sizes[supersets] == base.size + added]
        if chosen.size == 0:
            continue
        mean_value = float(table.values[chosen].mean())
        relative = (mean_value - base_value) / base_value if base_value != 0 else None
        steps.append(DegradationStep(added=added, count=int(chosen.size), mean_value=mean_value, relative_change=relative))
    if not steps:
        raise InvalidArgument(f"no present supersets of {base.label}")
    return DegradationProfile(base=base.label, base_value=base_value, steps=steps)
