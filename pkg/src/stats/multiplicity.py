"""Multiple-comparison corrections: Bonferroni, Holm step-down and
Benjamini-Hochberg step-up, each with monotone adjusted p values."""
from typing import List, Sequence

import numpy as np
from pydantic import BaseModel, ConfigDict

from src.exceptions import InvalidArgument


class MultipleTestResult(BaseModel):
    model_config = ConfigDict(frozen=True)

    method: str
    alpha: float
    reject: List[bool]
    adjusted: List[float]

    @property
    def n_rejected(self) -> int:
        return sum(self.reject)


def _validate(pvalues: Sequence[float], alpha: float) -> np.ndarray:
    p = np.asarray(pvalues, dtype=float)
    if p.ndim != 1:
        raise InvalidArgument("p values must be a flat list")
    if np.any(~np.isfinite(p)) or np.any(p < 0) or np.any(p > 1):
        raise InvalidArgument("p values must lie in [0, 1]")
    if not 0 < alpha < 1:
        raise InvalidArgument(f"alpha must lie in (0, 1), got {alpha}")
    return p


def _result(method: str, alpha: float, adjusted: np.ndarray) -> MultipleTestResult:
    return MultipleTestResult(
        method=method,
        alpha=alpha,
        reject=[bool(a <= alpha) for a in adjusted],
        adjusted=[float(a) for a in adjusted],
    )


def bonferroni(pvalues: Sequence[float], alpha: float = 0.05) -> MultipleTestResult:
    p = _validate(pvalues, alpha)
    return _result("bonferroni", alpha, np.minimum(1.0, p * p.size))


def holm(pvalues: Sequence[float], alpha: float = 0.05) -> MultipleTestResult:
    p = _validate(pvalues, alpha)
    m = p.size
    order = np.argsort(p, kind="stable")
    stepped = np.minimum(1.0, (m - np.arange(m)) * p[order])
    adjusted = np.empty(m)
    adjusted[order] = np.maximum.accumulate(stepped) if m else stepped
    return _result("holm", alpha, adjusted)


def bh(pvalues: Sequence[float], alpha: float = 0.05) -> MultipleTestResult:
    p = _validate(pvalues, alpha)
    m = p.size
    order = np.argsort(p, kind="stable")
    scaled = p[order] * m / np.arange(1, m + 1)
    adjusted = np.empty(m)
    if m:
        adjusted[order] = np.minimum(1.0, np.minimum.accumulate(scaled[::-1])[::-1])
    return _result("benjamini-hochberg", alpha, adjusted)
