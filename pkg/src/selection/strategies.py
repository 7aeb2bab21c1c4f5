"""Subset selection over a coalition table: exhaustive optimum per size,
the optimal size k*, greedy forward selection and their comparison."""
import logging
from typing import Dict, List, Optional

import numpy as np
from pydantic import BaseModel, ConfigDict

from src.config.config import TIE_TOLERANCE
from src.lattice.coalition import CoalitionTable, ComponentSet, popcounts, require_same_universe

logger = logging.getLogger(__name__)

TIE_BREAK_RULE = "value ties go to the smallest coalition size, then to canonical mask order"


class SizeOptimum(BaseModel):
    model_config = ConfigDict(frozen=True)

    size: int
    coalition: str
    mask: int
    value: float


class BestPerSize(BaseModel):
    model_config = ConfigDict(frozen=True)

    optima: List[SizeOptimum]
    k_star: int
    best: SizeOptimum
    tie_break: str = TIE_BREAK_RULE


class GreedyStep(BaseModel):
    model_config = ConfigDict(frozen=True)

    coalition: str
    value: float
    marginals: Dict[str, float]
    added: Optional[str] = None


class GreedyPath(BaseModel):
    model_config = ConfigDict(frozen=True)

    start: str
    steps: List[GreedyStep]
    final: str
    final_mask: int
    final_value: float


class SelectionReport(BaseModel):
    model_config = ConfigDict(frozen=True)

    best_per_k: List[SizeOptimum]
    k_star: int
    best: SizeOptimum
    greedy_path: GreedyPath
    greedy_final: str
    greedy_value: float
    optimality_gap: float
    improvement_pct: Optional[float] = None
    full_value: float
    best_vs_full_gap: Optional[float] = None
    tie_break: str = TIE_BREAK_RULE


def best_per_k(table: CoalitionTable, tolerance: float = TIE_TOLERANCE) -> BestPerSize:
    table.require_complete()
    values = table.values
    sizes = popcounts(table.k)
    optima = []
    for size in range(table.k + 1):
        masks = np.flatnonzero(sizes == size)
        top = values[masks].max()
        # First mask within tolerance of the maximum, in canonical order
        mask = int(masks[np.argmax(values[masks] >= top - tolerance)])
        optima.append(SizeOptimum(size=size, coalition=table.coalition(mask).label, mask=mask, value=float(values[mask])))
    overall = max(o.value for o in optima)
    best = next(o for o in optima if o.value >= overall - tolerance)
    logger.info(f"k* = {best.size}: {best.coalition} at {best.value}")
    return BestPerSize(optima=optima, k_star=best.size, best=best)


def greedy_forward(table: CoalitionTable, start: Optional[ComponentSet] = None) -> GreedyPath:
    """Add the component with the largest strictly positive marginal until
    none is left; equal marginals go to the earlier component."""
    table.require_complete()
    if start is None:
        start = ComponentSet.empty(table.universe)
    require_same_universe(start.universe, table.universe)
    values = table.values
    mask = start.mask
    steps = []
    while True:
        current = table.coalition(mask)
        marginals = {
            name: float(values[mask | (1 << i)] - values[mask])
            for i, name in enumerate(table.universe)
            if not mask >> i & 1
        }
        chosen = None
        for name, gain in marginals.items():
            if gain > 0 and (chosen is None or gain > marginals[chosen]):
                chosen = name
        steps.append(GreedyStep(coalition=current.label, value=float(values[mask]), marginals=marginals, added=chosen))
        if chosen is None:
            break
        logger.debug(f"Greedy adds {chosen} to {current.label} (+{marginals[chosen]:.4f})")
        mask |= 1 << table.universe.index(chosen)
    final = table.coalition(mask)
    return GreedyPath(start=start.label, steps=steps, final=final.label, final_mask=mask, final_value=float(values[mask]))


def compare_strategies(table: CoalitionTable, start: Optional[ComponentSet] = None) -> SelectionReport:
    """Exhaustive optimum against greedy forward selection (from the empty
    coalition unless ``start`` is given)."""
    exhaustive = best_per_k(table)
    greedy = greedy_forward(table, start)
    gap = max(0.0, exhaustive.best.value - greedy.final_value)
    improvement = gap / greedy.final_value * 100.0 if greedy.final_value != 0 else None
    full_value = float(table.values[-1])
    vs_full = (exhaustive.best.value - full_value) / full_value if full_value != 0 else None
    logger.info(f"Greedy reaches {greedy.final} ({greedy.final_value}); optimality gap {gap:.4f}")
    return SelectionReport(
        best_per_k=exhaustive.optima,
        k_star=exhaustive.k_star,
        best=exhaustive.best,
        greedy_path=greedy,
        greedy_final=greedy.final,
        greedy_value=greedy.final_value,
        optimality_gap=gap,
        improvement_pct=improvement,
        full_value=full_value,
        best_vs_full_gap=vs_full,
    )
