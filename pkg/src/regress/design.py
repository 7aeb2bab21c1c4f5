"""Factorial design matrices over a coalition table.

Rows follow canonical mask order. Columns are the intercept, then main
effects in universe order, then pairs (i < j) in lexicographic order; the
``full`` order instead has one column per coalition in mask order.
"""
import logging
import threading
from typing import List, Literal, Tuple

import numpy as np
from cachetools import LRUCache, cached
from pydantic import BaseModel, ConfigDict, field_validator

from src.exceptions import TooFewRows
from src.lattice.coalition import CoalitionTable, Universe, as_universe, require_same_universe

logger = logging.getLogger(__name__)

INTERCEPT = "intercept"

Encoding = Literal["binary", "spin"]
Order = Literal["main", "pairwise", "full"]


@cached(cache=LRUCache(maxsize=64), lock=threading.Lock())
def design_terms(k: int, order: str) -> Tuple[Tuple[int, ...], ...]:
    """Component index tuples, one per column; the intercept is ()."""
    if order == "full":
        return tuple(tuple(i for i in range(k) if mask >> i & 1) for mask in range(1 << k))
    terms: List[Tuple[int, ...]] = [()]
    terms.extend((i,) for i in range(k))
    if order == "pairwise":
        terms.extend((i, j) for i in range(k) for j in range(i + 1, k))
    return tuple(terms)


class DesignSpec(BaseModel):
    model_config = ConfigDict(frozen=True)

    universe: Universe
    encoding: Encoding = "binary"
    order: Order = "main"

    @field_validator("universe", mode="before")
    @classmethod
    def _universe(cls, value):
        return as_universe(value)

    @property
    def k(self) -> int:
        return len(self.universe)

    @property
    def terms(self) -> Tuple[Tuple[int, ...], ...]:
        return design_terms(self.k, self.order)

    @property
    def column_names(self) -> List[str]:
        return [INTERCEPT if not term else "*".join(self.universe[i] for i in term) for term in self.terms]

    @property
    def n_columns(self) -> int:
        return len(self.terms)


class DesignMatrix(BaseModel):
    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    spec: DesignSpec
    X: np.ndarray
    y: np.ndarray
    masks: np.ndarray

    @property
    def n(self) -> int:
        return self.X.shape[0]

    @property
    def p(self) -> int:
        return self.X.shape[1]


def encode(masks: np.ndarray, spec: DesignSpec) -> np.ndarray:
    """Design rows for the given coalition masks."""
    masks = np.asarray(masks, dtype=np.int64)
    bits = ((masks[:, None] >> np.arange(spec.k)) & 1).astype(float)
    features = bits if spec.encoding == "binary" else 2.0 * bits - 1.0
    X = np.ones((masks.size, spec.n_columns))
    for col, term in enumerate(spec.terms):
        for i in term:
            X[:, col] *= features[:, i]
    return X


def build_design(table: CoalitionTable, spec: DesignSpec, allow_partial: bool = False) -> DesignMatrix:
    """Design matrix and response for the present coalitions of ``table``.

    A partial table is accepted only with ``allow_partial`` and needs at
    least one more row than there are parameters.
    """
    require_same_universe(spec.universe, table.universe)
    if not allow_partial:
        table.require_complete()
    masks = np.flatnonzero(table.present)
    required = spec.n_columns if table.is_complete else spec.n_columns + 1
    if masks.size < required:
        raise TooFewRows(int(masks.size), spec.n_columns)
    X = encode(masks, spec)
    y = table.values[masks].astype(float)
    for array in (X, y, masks):
        array.setflags(write=False)
    logger.debug(f"Design {spec.encoding}/{spec.order}: {X.shape[0]}x{X.shape[1]}")
    return DesignMatrix(spec=spec, X=X, y=y, masks=masks)
