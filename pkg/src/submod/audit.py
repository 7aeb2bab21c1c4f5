"""Submodularity audit over every (S, T, i) triple with S ⊊ T and i ∉ T.

For each triple the subset gain Δ(i|S) = f(S ∪ {i}) - f(S) is compared with
the superset gain Δ(i|T). Diminishing returns requires Δ(i|T) <= Δ(i|S); a
triple with gap = Δ(i|T) - Δ(i|S) > 0 is a violation. Comparisons against
zero use TIE_TOLERANCE so that rounding residue on exactly-tied marginals is
neither a violation nor a sign flip.
"""
import logging
import threading
from typing import Iterator, List, Optional, Sequence, Tuple

import numpy as np
from cachetools import LRUCache, cached
from pydantic import BaseModel, ConfigDict, model_validator
from scipy import stats as sps

from src.config.config import (
    CLUSTER_RESAMPLES,
    DEFAULT_CONFIDENCE,
    DEFAULT_GAP_THRESHOLDS,
    DEFAULT_SEED,
    MIN_RESAMPLES,
    TIE_TOLERANCE,
)
from src.exceptions import InvalidArgument, TooFewUnits
from src.lattice.coalition import (
    CoalitionTable,
    ComponentSet,
    Universe,
    as_universe,
    component_index,
)
from src.lattice.task_matrix import TaskMatrix, submasks
from src.stats.bootstrap import BootstrapCI, percentile_interval, resample_statistics
from src.stats.rng import check_seed

logger = logging.getLogger(__name__)

GAMMA_VARIANTS = {
    "positive-gains": "gamma = gain(i|S) / gain(i|T) over triples with both gains > 0",
    "violations-only": "gamma = gain(i|S) / gain(i|T) over violating triples with gain(i|T) > 0",
}


class Triple(BaseModel):
    model_config = ConfigDict(frozen=True)

    S: ComponentSet
    T: ComponentSet
    i: str
    gain_sub: float
    gain_sup: float
    gap: float
    violation: bool
    sign_flip: bool

    @model_validator(mode="after")
    def _check(self) -> "Triple":
        if not (self.S.is_subset_of(self.T) and self.S.mask != self.T.mask):
            raise ValueError("S must be a proper subset of T")
        if self.T.contains(self.i):
            raise ValueError("i must lie outside T")
        return self


class SubmodularityAudit(BaseModel):
    model_config = ConfigDict(frozen=True)

    universe: Universe
    triples: List[Triple]
    n_triples: int
    n_violations: int
    n_antiviolations: int
    n_sign_flips: int
    violation_rate: float
    gap_thresholds: List[float]
    gap_counts: List[int]
    gamma_variant: str
    gamma_definition: str
    gamma_values: List[float]
    gamma_median: Optional[float] = None


class TopViolations(BaseModel):
    model_config = ConfigDict(frozen=True)

    triples: List[Triple]
    sign_flip_fraction: float
    min_gap: Optional[float] = None
    designated: Optional[str] = None
    designated_context_fraction: Optional[float] = None


class TripleTest(BaseModel):
    model_config = ConfigDict(frozen=True)

    S: str
    T: str
    i: str
    mean_gap: float
    statistic: Optional[float] = None
    p_two_sided: float
    p_adjusted: float
    significant: bool


class TripleSignificance(BaseModel):
    model_config = ConfigDict(frozen=True)

    family_size: int
    alpha: float
    tests: List[TripleTest]
    n_significant: int


def triple_count(k: int) -> int:
    """Closed form k * (3^(k-1) - 2^(k-1))."""
    if k < 1:
        return 0
    return k * (3 ** (k - 1) - 2 ** (k - 1))


@cached(cache=LRUCache(maxsize=16), lock=threading.Lock())
def triple_index(k: int) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Canonical triple order as arrays (component bit index, S mask, T mask):
    by component, then T mask, then S mask."""
    comps: List[int] = []
    subs: List[int] = []
    sups: List[int] = []
    for i in range(k):
        bit = 1 << i
        for t_mask in range(1 << k):
            if t_mask & bit:
                continue
            for s_mask in submasks(t_mask):
                if s_mask == t_mask:
                    continue
                comps.append(i)
                subs.append(int(s_mask))
                sups.append(t_mask)
    arrays = tuple(np.array(a, dtype=np.int64) for a in (comps, subs, sups))
    for array in arrays:
        array.setflags(write=False)
    return arrays


def enumerate_triples(universe: Sequence[str]) -> Tuple[int, Iterator[Tuple[ComponentSet, ComponentSet, str]]]:
    """Triple count and a lazy iterator over (S, T, i) in canonical order."""
    universe = as_universe(universe)
    k = len(universe)

    def generate() -> Iterator[Tuple[ComponentSet, ComponentSet, str]]:
        comps, subs, sups = triple_index(k)
        for i, s_mask, t_mask in zip(comps, subs, sups):
            yield (
                ComponentSet(universe=universe, mask=int(s_mask)),
                ComponentSet(universe=universe, mask=int(t_mask)),
                universe[int(i)],
            )

    return triple_count(k), generate()


def _gains(values: np.ndarray, k: int) -> Tuple[np.ndarray, np.ndarray]:
    """Subset and superset gains for every triple; ``values`` may carry
    leading axes (e.g. one row per resample)."""
    comps, subs, sups = triple_index(k)
    bits = np.left_shift(1, comps)
    gain_sub = values[..., subs | bits] - values[..., subs]
    gain_sup = values[..., sups | bits] - values[..., sups]
    return gain_sub, gain_sup


def _sign_flips(gain_sub: np.ndarray, gain_sup: np.ndarray, tolerance: float) -> np.ndarray:
    return ((gain_sub > tolerance) & (gain_sup < -tolerance)) | ((gain_sub < -tolerance) & (gain_sup > tolerance))


def _gamma(gain_sub: np.ndarray, gain_sup: np.ndarray, variant: str, tolerance: float) -> np.ndarray:
    if variant == "positive-gains":
        keep = (gain_sub > tolerance) & (gain_sup > tolerance)
    else:
        keep = (gain_sup - gain_sub > tolerance) & (gain_sup > tolerance)
    return gain_sub[keep] / gain_sup[keep]


def _check_thresholds(thresholds: Sequence[float]) -> List[float]:
    thresholds = [float(t) for t in thresholds]
    if any(t < 0 for t in thresholds) or thresholds != sorted(thresholds):
        raise InvalidArgument("gap thresholds must be non-negative and ascending")
    return thresholds


def audit(
    table: CoalitionTable,
    gap_thresholds: Sequence[float] = DEFAULT_GAP_THRESHOLDS,
    gamma_variant: str = "positive-gains",
    tolerance: float = TIE_TOLERANCE,
) -> SubmodularityAudit:
    table.require_complete()
    thresholds = _check_thresholds(gap_thresholds)
    if gamma_variant not in GAMMA_VARIANTS:
        raise InvalidArgument(f"unknown gamma variant {gamma_variant!r}; choose from {sorted(GAMMA_VARIANTS)}")
    k = table.k
    comps, subs, sups = triple_index(k)
    gain_sub, gain_sup = _gains(table.values, k)
    gaps = gain_sup - gain_sub
    violations = gaps > tolerance
    flips = _sign_flips(gain_sub, gain_sup, tolerance)
    triples = [
        Triple(
            S=ComponentSet(universe=table.universe, mask=int(subs[n])),
            T=ComponentSet(universe=table.universe, mask=int(sups[n])),
            i=table.universe[int(comps[n])],
            gain_sub=float(gain_sub[n]),
            gain_sup=float(gain_sup[n]),
            gap=float(gaps[n]),
            violation=bool(violations[n]),
            sign_flip=bool(flips[n]),
        )
        for n in range(gaps.size)
    ]
    gamma_values = _gamma(gain_sub, gain_sup, gamma_variant, tolerance)
    n_violations = int(violations.sum())
    result = SubmodularityAudit(
        universe=table.universe,
        triples=triples,
        n_triples=len(triples),
        n_violations=n_violations,
        n_antiviolations=int((gaps < -tolerance).sum()),
        n_sign_flips=int(flips.sum()),
        violation_rate=n_violations / len(triples) if triples else 0.0,
        gap_thresholds=thresholds,
        gap_counts=[int((gaps > t + tolerance).sum()) for t in thresholds],
        gamma_variant=gamma_variant,
        gamma_definition=GAMMA_VARIANTS[gamma_variant],
        gamma_values=[float(g) for g in gamma_values],
        gamma_median=float(np.median(gamma_values)) if gamma_values.size else None,
    )
    logger.info(f"Submodularity audit: {n_violations} violations in {len(triples)} triples")
    return result


def top_violations(audit_result: SubmodularityAudit, n: int = 20, designated: Optional[str] = None) -> TopViolations:
    """The ``n`` violations with the largest gap.

    Ties in gap go to the smaller superset, then to canonical mask order.
    ``designated_context_fraction`` is the share of the selected triples whose
    context (T, which contains S) includes the designated component.
    """
    if n < 1:
        raise InvalidArgument("n must be at least 1")
    universe = audit_result.universe
    if designated is not None:
        component_index(universe, designated)
    ranked = sorted(
        (t for t in audit_result.triples if t.violation),
        key=lambda t: (-round(t.gap, 12), t.T.size, t.T.mask, t.S.mask, universe.index(t.i)),
    )[:n]
    if not ranked:
        return TopViolations(triples=[], sign_flip_fraction=0.0, designated=designated)
    flip_fraction = sum(t.sign_flip for t in ranked) / len(ranked)
    context_fraction = None
    if designated is not None:
        context_fraction = sum(t.T.contains(designated) for t in ranked) / len(ranked)
    return TopViolations(
        triples=ranked,
        sign_flip_fraction=flip_fraction,
        min_gap=min(t.gap for t in ranked),
        designated=designated,
        designated_context_fraction=context_fraction,
    )


def _cluster_bootstrap(
    matrix: TaskMatrix,
    statistic,
    resamples: int,
    seed: int,
    level: float,
    workers: Optional[int],
) -> BootstrapCI:
    matrix.require_complete()
    if matrix.n_units < 2:
        raise TooFewUnits(matrix.n_units, 2)
    if resamples < MIN_RESAMPLES:
        raise InvalidArgument(f"need at least {MIN_RESAMPLES} resamples, got {resamples}")
    seed = check_seed(seed)
    values = matrix.values
    point = statistic(values.mean(axis=0))
    if np.isnan(point):
        raise InvalidArgument("statistic is undefined on the full matrix")
    replicates = resample_statistics(
        matrix.n_units, lambda rows: statistic(values[rows].mean(axis=0)), resamples, seed, workers
    )
    lo, hi = percentile_interval(replicates[~np.isnan(replicates)], level)
    return BootstrapCI(
        method="cluster-percentile",
        level=level,
        lo=float(lo),
        hi=float(hi),
        point_estimate=float(point),
        resamples=resamples,
        seed=seed,
        n_units=matrix.n_units,
    )


def cluster_bootstrap_violation_rate(
    matrix: TaskMatrix,
    resamples: int = CLUSTER_RESAMPLES,
    seed: int = DEFAULT_SEED,
    level: float = DEFAULT_CONFIDENCE,
    tolerance: float = TIE_TOLERANCE,
    workers: Optional[int] = None,
) -> BootstrapCI:
    """Violation rate of the task-mean table with a task-level cluster
    bootstrap percentile interval."""
    k = matrix.k
    count = triple_count(k)

    def rate(mean_values: np.ndarray) -> float:
        if count == 0:
            return 0.0
        gain_sub, gain_sup = _gains(mean_values, k)
        return float(np.count_nonzero(gain_sup - gain_sub > tolerance) / count)

    result = _cluster_bootstrap(matrix, rate, resamples, seed, level, workers)
    logger.info(f"Violation rate {result.point_estimate:.3f} [{result.lo:.3f}, {result.hi:.3f}]")
    return result


def cluster_bootstrap_gamma_median(
    matrix: TaskMatrix,
    resamples: int = CLUSTER_RESAMPLES,
    seed: int = DEFAULT_SEED,
    level: float = DEFAULT_CONFIDENCE,
    gamma_variant: str = "positive-gains",
    tolerance: float = TIE_TOLERANCE,
    workers: Optional[int] = None,
) -> BootstrapCI:
    """Median submodularity ratio with a cluster bootstrap interval;
    resamples with no qualifying triple are left out of the quantiles."""
    if gamma_variant not in GAMMA_VARIANTS:
        raise InvalidArgument(f"unknown gamma variant {gamma_variant!r}")
    k = matrix.k

    def median(mean_values: np.ndarray) -> float:
        gain_sub, gain_sup = _gains(mean_values, k)
        gamma = _gamma(gain_sub, gain_sup, gamma_variant, tolerance)
        return float(np.median(gamma)) if gamma.size else float("nan")

    return _cluster_bootstrap(matrix, median, resamples, seed, level, workers)


def triple_significance(
    matrix: TaskMatrix,
    triples: Optional[Sequence[Triple]] = None,
    alpha: float = 0.05,
) -> TripleSignificance:
    """Per-triple one-sample t tests of the per-task gap against 0, with a
    Bonferroni adjustment over the whole triple family."""
    matrix.require_complete()
    if matrix.n_units < 2:
        raise TooFewUnits(matrix.n_units, 2)
    if not 0 < alpha < 1:
        raise InvalidArgument(f"alpha must lie in (0, 1), got {alpha}")
    k = matrix.k
    comps, subs, sups = triple_index(k)
    family = comps.size
    gain_sub, gain_sup = _gains(matrix.values, k)
    gaps = gain_sup - gain_sub
    if triples is None:
        selected = np.arange(family)
    else:
        lookup = {(int(c), int(s), int(t)): n for n, (c, s, t) in enumerate(zip(comps, subs, sups))}
        selected = np.array([lookup[(component_index(matrix.universe, t.i), t.S.mask, t.T.mask)] for t in triples], dtype=np.int64)
    n = matrix.n_units
    tests = []
    for idx in selected:
        column = gaps[:, idx]
        mean = float(column.mean())
        sd = float(column.std(ddof=1))
        if sd == 0.0:
            statistic = None
            p = 1.0 if mean == 0.0 else 0.0
        else:
            statistic = mean / (sd / np.sqrt(n))
            p = float(min(1.0, 2.0 * sps.t.sf(abs(statistic), n - 1)))
        adjusted = min(1.0, p * family)
        tests.append(
            TripleTest(
                S=ComponentSet(universe=matrix.universe, mask=int(subs[idx])).label,
                T=ComponentSet(universe=matrix.universe, mask=int(sups[idx])).label,
                i=matrix.universe[int(comps[idx])],
                mean_gap=mean,
                statistic=statistic,
                p_two_sided=p,
                p_adjusted=adjusted,
                significant=adjusted <= alpha,
            )
        )
    return TripleSignificance(family_size=family, alpha=alpha, tests=tests, n_significant=sum(t.significant for t in tests))
