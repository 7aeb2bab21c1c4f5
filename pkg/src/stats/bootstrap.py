"""Percentile, BCa and cluster bootstrap confidence intervals.

Every resample draws its unit indices from the stream keyed by
(seed, resample index), so intervals are bit-identical for any worker count.
"""
import logging
from concurrent.futures import ThreadPoolExecutor
from typing import Callable, List, Optional, Sequence, Tuple, Union

import numpy as np
from pydantic import BaseModel, ConfigDict, model_validator
from scipy import stats as sps

from src.config.config import (
    BCA_RESAMPLES,
    DEFAULT_CONFIDENCE,
    DEFAULT_RESAMPLES,
    DEFAULT_SEED,
    MIN_RESAMPLES,
    settings,
)
from src.exceptions import InvalidArgument, TooFewUnits, ZeroVariance
from src.lattice.coalition import CoalitionTable, ComponentSet, require_same_universe
from src.lattice.mobius import coalition_dividend
from src.lattice.task_matrix import TaskMatrix
from src.stats.rng import check_seed, resample_indices
from src.stats.significance import one_sample_t

logger = logging.getLogger(__name__)

METHODS = ("percentile", "bca", "cluster-percentile")
DEGENERATE_JACKKNIFE = "degenerate-jackknife: BCa fell back to percentile"

VectorStatistic = Callable[[np.ndarray], float]
TableStatistic = Callable[[CoalitionTable], float]


class BootstrapCI(BaseModel):
    model_config = ConfigDict(frozen=True)

    method: str
    level: float
    lo: float
    hi: float
    point_estimate: float
    resamples: int
    seed: int
    n_units: int
    z0: Optional[float] = None
    acceleration: Optional[float] = None
    p_one_sided: Optional[float] = None
    p_one_sided_t: Optional[float] = None
    warnings: List[str] = []

    @model_validator(mode="after")
    def _ordered(self) -> "BootstrapCI":
        if self.lo > self.hi:
            raise ValueError(f"interval endpoints out of order: {self.lo} > {self.hi}")
        return self


def resample_statistics(
    n_units: int,
    statistic: Callable[[np.ndarray], float],
    resamples: int,
    seed: int,
    workers: Optional[int] = None,
) -> np.ndarray:
    """Evaluate ``statistic(rows)`` on every resample of unit indices."""
    seed = check_seed(seed)
    workers = max(1, int(workers or settings.LATTICE_THREADS))
    replicates = np.empty(resamples)

    def run(chunk: range) -> None:
        for r in chunk:
            replicates[r] = statistic(resample_indices(seed, r, n_units))

    bounds = np.linspace(0, resamples, workers + 1).astype(int)
    chunks = [range(bounds[i], bounds[i + 1]) for i in range(workers)]
    if workers == 1:
        run(chunks[0])
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            list(pool.map(run, chunks))
    return replicates


def percentile_interval(replicates: np.ndarray, level: float = DEFAULT_CONFIDENCE, axis: int = -1) -> Tuple[np.ndarray, np.ndarray]:
    """Equal-tailed quantiles of the replicate distribution."""
    tail = (1.0 - level) / 2.0
    lo, hi = np.quantile(replicates, [tail, 1.0 - tail], axis=axis)
    return lo, hi


def jackknife_acceleration(jackknife_values: np.ndarray) -> Optional[float]:
    """Acceleration from jackknife skewness; None when all values coincide."""
    centred = jackknife_values.mean() - jackknife_values
    spread = np.sum(centred ** 2)
    scale = max(1.0, float(np.abs(jackknife_values).max()))
    if np.ptp(jackknife_values) <= 1e-12 * scale or spread == 0.0:
        return None
    return float(np.sum(centred ** 3) / (6.0 * spread ** 1.5))


def bca_interval(
    replicates: np.ndarray,
    point_estimate: float,
    acceleration: float,
    level: float = DEFAULT_CONFIDENCE,
) -> Tuple[float, float, float]:
    """Bias-corrected and accelerated interval; returns (lo, hi, z0)."""
    b = replicates.size
    below = np.count_nonzero(replicates < point_estimate) / b
    # Keep z0 finite when every replicate falls on one side
    below = min(max(below, 1.0 / (2 * b)), 1.0 - 1.0 / (2 * b))
    z0 = float(sps.norm.ppf(below))
    z_tail = sps.norm.ppf((1.0 - level) / 2.0)
    levels = []
    for z in (z_tail, -z_tail):
        shifted = z0 + z
        levels.append(float(sps.norm.cdf(z0 + shifted / (1.0 - acceleration * shifted))))
    lo, hi = np.quantile(replicates, levels)
    return float(lo), float(hi), z0


def _check_request(n_units: int, method: str, level: float, resamples: int) -> None:
    if method not in METHODS:
        raise InvalidArgument(f"unknown bootstrap method {method!r}; choose from {METHODS}")
    if not 0.0 < level < 1.0:
        raise InvalidArgument(f"confidence level must lie in (0, 1), got {level}")
    if resamples < MIN_RESAMPLES:
        raise InvalidArgument(f"need at least {MIN_RESAMPLES} resamples, got {resamples}")
    if n_units < 2:
        raise TooFewUnits(n_units, 2)
    if method == "bca" and n_units < 3:
        raise TooFewUnits(n_units, 3)


def _interval(
    replicates: np.ndarray,
    point: float,
    jackknife: Callable[[], np.ndarray],
    method: str,
    level: float,
) -> Tuple[float, float, Optional[float], Optional[float], List[str]]:
    if method != "bca":
        lo, hi = percentile_interval(replicates, level)
        return float(lo), float(hi), None, None, []
    acceleration = jackknife_acceleration(jackknife())
    if acceleration is None:
        logger.warning("All jackknife values are equal; BCa falls back to the percentile interval")
        lo, hi = percentile_interval(replicates, level)
        return float(lo), float(hi), None, None, [DEGENERATE_JACKKNIFE]
    lo, hi, z0 = bca_interval(replicates, point, acceleration, level)
    return lo, hi, z0, acceleration, []


def _bootstrap(
    data: Union[Sequence[float], np.ndarray, TaskMatrix],
    statistic: Optional[Union[VectorStatistic, TableStatistic]],
    method: str,
    level: float,
    resamples: int,
    seed: int,
    workers: Optional[int],
) -> Tuple[BootstrapCI, np.ndarray]:
    if isinstance(data, TaskMatrix):
        if statistic is None:
            raise InvalidArgument("a table statistic is required for a task matrix")
        if method == "percentile":
            method = "cluster-percentile"
        matrix = data
        _check_request(matrix.n_units, method, level, resamples)
        point = float(statistic(matrix.mean_table()))
        all_rows = np.arange(matrix.n_units)

        def on_rows(rows: np.ndarray) -> float:
            return float(statistic(matrix.mean_table(rows)))

        def jackknife() -> np.ndarray:
            return np.array([on_rows(np.delete(all_rows, i)) for i in range(matrix.n_units)])

        n_units = matrix.n_units
    else:
        if method == "cluster-percentile":
            raise InvalidArgument("cluster-percentile needs a task matrix")
        values = np.asarray(data, dtype=float)
        if values.ndim != 1:
            raise InvalidArgument("scalar bootstrap data must be one-dimensional")
        _check_request(values.size, method, level, resamples)
        func = statistic if statistic is not None else np.mean
        point = float(func(values))

        def on_rows(rows: np.ndarray) -> float:
            return float(func(values[rows]))

        def jackknife() -> np.ndarray:
            return np.array([float(func(np.delete(values, i))) for i in range(values.size)])

        n_units = values.size

    replicates = resample_statistics(n_units, on_rows, resamples, seed, workers)
    lo, hi, z0, acceleration, notes = _interval(replicates, point, jackknife, method, level)
    logger.info(f"Bootstrap ({method}, {resamples} resamples): {point:.4f} [{lo:.4f}, {hi:.4f}]")
    result = BootstrapCI(
        method=method,
        level=level,
        lo=lo,
        hi=hi,
        point_estimate=point,
        resamples=resamples,
        seed=seed,
        n_units=n_units,
        z0=z0,
        acceleration=acceleration,
        warnings=notes,
    )
    return result, replicates


def bootstrap_ci(
    data: Union[Sequence[float], np.ndarray, TaskMatrix],
    statistic: Optional[Union[VectorStatistic, TableStatistic]] = None,
    method: str = "percentile",
    level: float = DEFAULT_CONFIDENCE,
    resamples: int = DEFAULT_RESAMPLES,
    seed: int = DEFAULT_SEED,
    workers: Optional[int] = None,
) -> BootstrapCI:
    """Bootstrap CI for a statistic of a scalar sample or of a task matrix.

    For a scalar sample ``statistic`` maps the resampled values to a float
    (default: the mean). For a TaskMatrix whole units are resampled and
    ``statistic`` maps the resampled mean coalition table to a float;
    ``percentile`` is then the cluster percentile interval.
    """
    result, _ = _bootstrap(data, statistic, method, level, resamples, seed, workers)
    return result


def harsanyi_bootstrap(
    matrix: TaskMatrix,
    coalition: ComponentSet,
    method: str = "bca",
    level: float = DEFAULT_CONFIDENCE,
    resamples: int = BCA_RESAMPLES,
    seed: int = DEFAULT_SEED,
    workers: Optional[int] = None,
) -> BootstrapCI:
    """Bootstrap CI for the Harsanyi dividend of ``coalition`` in the mean
    table, resampling whole tasks.

    The dividend is linear in the table, so the dividend of a resampled mean
    table equals the mean of the resampled per-task dividends. Two one-sided
    p values against 0 are attached: the share of replicates at or below 0,
    and a one-sample t test on the per-task dividends.
    """
    require_same_universe(coalition.universe, matrix.universe)
    matrix.require_sublattice(coalition)
    per_task = np.atleast_1d(np.asarray(coalition_dividend(matrix.values, coalition.mask), dtype=float))
    if method == "cluster-percentile":
        method = "percentile"
    result, replicates = _bootstrap(per_task, np.mean, method, level, resamples, seed, workers)
    try:
        t_p = one_sample_t(per_task, cauchy_scale=None).p_one_sided
    except ZeroVariance:
        t_p = None
    logger.info(f"Dividend of {coalition.label}: {result.point_estimate:.4f} [{result.lo:.4f}, {result.hi:.4f}]")
    return result.model_copy(
        update={
            "method": "cluster-percentile" if method == "percentile" else method,
            "p_one_sided": float(np.count_nonzero(replicates <= 0.0) / resamples),
            "p_one_sided_t": t_p,
        }
    )
