"""Paired and nonparametric significance tests."""
import logging
import math
from typing import List, Optional, Sequence

import numpy as np
from pydantic import BaseModel, ConfigDict, field_validator, model_validator
from scipy import stats as sps

from src.config.config import DEFAULT_CAUCHY_SCALE, WILCOXON_EXACT_MAX_N
from src.exceptions import (
    AllZeroDifferences,
    InvalidArgument,
    NoDiscordantPairs,
    TooFewUnits,
    ZeroVariance,
)
from src.lattice.coalition import CoalitionKey
from src.lattice.task_matrix import TaskMatrix
from src.stats.bayes import jzs_bf10

logger = logging.getLogger(__name__)

ALTERNATIVES = ("greater", "less")


class PairedSample(BaseModel):
    """Scores per unit under two configurations, a and b."""

    model_config = ConfigDict(frozen=True)

    labels: List[str]
    a: List[float]
    b: List[float]

    @model_validator(mode="after")
    def _check(self) -> "PairedSample":
        if not (len(self.labels) == len(self.a) == len(self.b)):
            raise InvalidArgument("labels, a and b must have equal lengths")
        if not self.a:
            raise TooFewUnits(0, 1)
        if not all(math.isfinite(x) for x in self.a + self.b):
            raise InvalidArgument("paired values must be finite")
        return self

    @classmethod
    def from_arrays(cls, a: Sequence[float], b: Sequence[float], labels: Optional[Sequence[str]] = None) -> "PairedSample":
        labels = list(labels) if labels is not None else [str(i) for i in range(len(a))]
        return cls(labels=labels, a=[float(x) for x in a], b=[float(x) for x in b])

    @classmethod
    def from_matrix(cls, matrix: TaskMatrix, a: CoalitionKey, b: CoalitionKey) -> "PairedSample":
        return cls.from_arrays(matrix.column(a), matrix.column(b), matrix.units)

    @property
    def n(self) -> int:
        return len(self.a)

    def differences(self) -> np.ndarray:
        return np.asarray(self.a) - np.asarray(self.b)

    def swapped(self) -> "PairedSample":
        return PairedSample(labels=self.labels, a=self.b, b=self.a)


class TestResult(BaseModel):
    # Not a pytest test class
    __test__ = False

    model_config = ConfigDict(frozen=True)

    test: str
    statistic: float
    df: Optional[float] = None
    p_one_sided: float
    p_two_sided: float
    effect_size: Optional[float] = None
    bf10: Optional[float] = None
    n: int
    alternative: str = "greater"
    method: str = "exact"
    notes: List[str] = []

    @field_validator("p_one_sided", "p_two_sided")
    @classmethod
    def _probability(cls, value: float) -> float:
        if not 0.0 <= value <= 1.0:
            raise ValueError(f"p value {value} outside [0, 1]")
        return value


def one_sample_t(
    values: Sequence[float],
    mu: float = 0.0,
    cauchy_scale: Optional[float] = DEFAULT_CAUCHY_SCALE,
    test: str = "one-sample t",
) -> TestResult:
    """t test of mean(values) against mu; one-sided alternative is mean > mu.

    The effect size is Cohen's d_z = t / sqrt(n).
    """
    x = np.asarray(values, dtype=float) - mu
    n = x.size
    if n < 2:
        raise TooFewUnits(n, 2)
    sd = float(np.std(x, ddof=1))
    if sd == 0.0:
        raise ZeroVariance()
    t = float(x.mean() / (sd / math.sqrt(n)))
    df = n - 1
    bf10 = jzs_bf10(t, n, cauchy_scale) if cauchy_scale is not None else None
    return TestResult(
        test=test,
        statistic=t,
        df=float(df),
        p_one_sided=float(sps.t.sf(t, df)),
        p_two_sided=float(min(1.0, 2.0 * sps.t.sf(abs(t), df))),
        effect_size=t / math.sqrt(n),
        bf10=bf10,
        n=n,
        method="t",
    )


def paired_t(sample: PairedSample, cauchy_scale: Optional[float] = DEFAULT_CAUCHY_SCALE) -> TestResult:
    """Paired t test on a - b."""
    return one_sample_t(sample.differences(), cauchy_scale=cauchy_scale, test="paired t")


def signed_rank_counts(doubled_ranks: Sequence[int]) -> np.ndarray:
    """Null distribution of the (doubled) positive rank sum: entry s counts
    the sign assignments whose doubled positive rank sum equals s."""
    total = int(sum(doubled_ranks))
    counts = np.zeros(total + 1, dtype=np.int64)
    counts[0] = 1
    for rank in doubled_ranks:
        shifted = np.zeros_like(counts)
        shifted[rank:] = counts[: total + 1 - rank]
        counts = counts + shifted
    return counts


def wilcoxon_exact(sample: PairedSample, alternative: str = "greater") -> TestResult:
    """Wilcoxon signed-rank test on a - b.

    Zero differences are dropped and tied magnitudes get midranks. The
    statistic W is the smaller of the positive and negative rank sums. For
    n <= 25 the p values are exact over all 2^n sign assignments; above that
    a continuity-corrected normal approximation is used and flagged.
    ``alternative="greater"`` tests a > b.
    """
    if alternative not in ALTERNATIVES:
        raise InvalidArgument(f"alternative must be one of {ALTERNATIVES}")
    diffs = sample.differences()
    diffs = diffs[diffs != 0.0]
    n = diffs.size
    if n == 0:
        raise AllZeroDifferences()
    ranks = sps.rankdata(np.abs(diffs), method="average")
    w_plus = float(ranks[diffs > 0].sum())
    w_minus = float(ranks[diffs < 0].sum())
    w = min(w_plus, w_minus)
    # For "greater" small W- is the evidence; by symmetry P(W+ >= obs) = P(W+ <= W-)
    tail_stat = w_minus if alternative == "greater" else w_plus
    notes = []
    if n <= WILCOXON_EXACT_MAX_N:
        doubled = [int(round(2 * r)) for r in ranks]
        counts = signed_rank_counts(doubled)
        total = float(2 ** n)
        p_one = counts[: int(round(2 * tail_stat)) + 1].sum() / total
        p_two = min(1.0, 2.0 * counts[: int(round(2 * w)) + 1].sum() / total)
        method = "exact"
    else:
        _, tie_counts = np.unique(np.abs(diffs), return_counts=True)
        mean = n * (n + 1) / 4.0
        var = n * (n + 1) * (2 * n + 1) / 24.0 - np.sum(tie_counts ** 3 - tie_counts) / 48.0
        sd = math.sqrt(var)
        p_one = float(sps.norm.cdf((tail_stat - mean + 0.5) / sd))
        p_two = float(min(1.0, 2.0 * sps.norm.cdf((w - mean + 0.5) / sd)))
        method = "normal-approximation"
        notes.append(f"n={n} exceeds {WILCOXON_EXACT_MAX_N}; normal approximation with continuity correction")
        logger.warning(notes[-1])
    return TestResult(
        test="wilcoxon signed-rank",
        statistic=w,
        p_one_sided=float(min(1.0, p_one)),
        p_two_sided=float(p_two),
        n=n,
        alternative=alternative,
        method=method,
        notes=notes,
    )


def mcnemar_exact(b: int, c: int) -> TestResult:
    """Exact McNemar test from the two discordant-pair counts."""
    if b < 0 or c < 0:
        raise InvalidArgument("discordant counts must be non-negative")
    n = b + c
    if n == 0:
        raise NoDiscordantPairs()
    low = min(b, c)
    tail = float(sps.binom.cdf(low, n, 0.5))
    return TestResult(
        test="mcnemar exact",
        statistic=float(low),
        p_one_sided=min(1.0, tail),
        p_two_sided=min(1.0, 2.0 * tail),
        n=n,
        alternative="two-sided",
        method="exact",
    )
