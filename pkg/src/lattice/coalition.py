"""Coalitions over a universe of named binary components, and value tables.

A coalition is stored as a bit mask over the universe: bit ``i`` is set when
``universe[i]`` is active. Universe order is declaration order and defines the
canonical mask order used by every table, report and file.
"""
import logging
import threading
from typing import Callable, Dict, Iterator, Mapping, Optional, Sequence, Tuple, Union

import numpy as np
from cachetools import LRUCache, cached
from pydantic import BaseModel, ConfigDict, model_validator

from src.config.config import MAX_COMPONENTS
from src.exceptions import (
    DuplicateComponent,
    IncompleteTable,
    InvalidArgument,
    InvalidUniverse,
    MissingCoalition,
    UniverseMismatch,
    UniverseTooLarge,
    UnknownComponent,
)

logger = logging.getLogger(__name__)

EMPTY_LABEL = "Bare"
FULL_LABEL = "All-In"
RESERVED_NAMES = frozenset({EMPTY_LABEL, FULL_LABEL, "value", "task"})

Universe = Tuple[str, ...]


@cached(cache=LRUCache(maxsize=256), lock=threading.Lock())
def validate_universe(names: Tuple[str, ...]) -> Universe:
    """Check component names and return the universe as a tuple."""
    if len(names) > MAX_COMPONENTS:
        raise UniverseTooLarge(len(names), MAX_COMPONENTS)
    seen = set()
    for name in names:
        if not isinstance(name, str) or not name or name != name.strip():
            raise InvalidUniverse(f"bad component name {name!r}")
        if name in RESERVED_NAMES or "+" in name or "," in name or name.startswith("#"):
            raise InvalidUniverse(f"reserved or unusable component name {name!r}")
        if name in seen:
            raise DuplicateComponent(name)
        seen.add(name)
    return tuple(names)


def as_universe(names: Sequence[str]) -> Universe:
    return validate_universe(tuple(names))


@cached(cache=LRUCache(maxsize=32), lock=threading.Lock())
def popcounts(k: int) -> np.ndarray:
    """Coalition sizes for every mask of a k-component universe."""
    masks = np.arange(1 << k, dtype=np.int64)
    counts = np.zeros(1 << k, dtype=np.int64)
    for bit in range(k):
        counts += (masks >> bit) & 1
    counts.setflags(write=False)
    return counts


def component_index(universe: Universe, name: str) -> int:
    try:
        return universe.index(name)
    except ValueError:
        raise UnknownComponent(name) from None


def require_same_universe(left: Universe, right: Universe) -> None:
    if tuple(left) != tuple(right):
        raise UniverseMismatch(left, right)


class ComponentSet(BaseModel):
    """A subset of the universe, identified by its membership mask."""

    model_config = ConfigDict(frozen=True)

    universe: Universe
    mask: int = 0

    @model_validator(mode="after")
    def _check(self) -> "ComponentSet":
        validate_universe(tuple(self.universe))
        if self.mask < 0 or self.mask >= (1 << len(self.universe)):
            raise InvalidArgument(f"mask {self.mask} out of range for {len(self.universe)} components")
        return self

    @classmethod
    def empty(cls, universe: Sequence[str]) -> "ComponentSet":
        return cls(universe=as_universe(universe), mask=0)

    @classmethod
    def full(cls, universe: Sequence[str]) -> "ComponentSet":
        universe = as_universe(universe)
        return cls(universe=universe, mask=(1 << len(universe)) - 1)

    @classmethod
    def from_names(cls, universe: Sequence[str], names: Sequence[str]) -> "ComponentSet":
        universe = as_universe(universe)
        mask = 0
        for name in names:
            bit = 1 << component_index(universe, name)
            if mask & bit:
                raise DuplicateComponent(name)
            mask |= bit
        return cls(universe=universe, mask=mask)

    @property
    def k(self) -> int:
        return len(self.universe)

    @property
    def size(self) -> int:
        return bin(self.mask).count("1")

    @property
    def members(self) -> Tuple[str, ...]:
        return tuple(name for i, name in enumerate(self.universe) if self.mask >> i & 1)

    @property
    def label(self) -> str:
        if self.mask == 0:
            return EMPTY_LABEL
        if self.mask == (1 << self.k) - 1:
            return FULL_LABEL
        return "+".join(self.members)

    def contains(self, name: str) -> bool:
        return bool(self.mask >> component_index(self.universe, name) & 1)

    def with_member(self, name: str) -> "ComponentSet":
        return ComponentSet(universe=self.universe, mask=self.mask | 1 << component_index(self.universe, name))

    def is_subset_of(self, other: "ComponentSet") -> bool:
        require_same_universe(self.universe, other.universe)
        return self.mask & other.mask == self.mask

    def __str__(self) -> str:
        return self.label


def parse_component_set(expr: str, universe: Sequence[str]) -> ComponentSet:
    """Parse a coalition label: "Bare" or "" for the empty set, "All-In" for
    the full set, otherwise "+"-joined component names (case-sensitive)."""
    universe = as_universe(universe)
    expr = expr.strip()
    if expr in ("", EMPTY_LABEL):
        return ComponentSet.empty(universe)
    if expr == FULL_LABEL:
        return ComponentSet.full(universe)
    return ComponentSet.from_names(universe, [token.strip() for token in expr.split("+")])


def label_of(universe: Universe, mask: int) -> str:
    return ComponentSet(universe=universe, mask=mask).label


CoalitionKey = Union[int, str, ComponentSet]


def resolve_mask(universe: Universe, key: CoalitionKey) -> int:
    """Accept a mask, a label or a ComponentSet and return the mask."""
    if isinstance(key, ComponentSet):
        require_same_universe(key.universe, universe)
        return key.mask
    if isinstance(key, str):
        return parse_component_set(key, universe).mask
    mask = int(key)
    if mask < 0 or mask >= (1 << len(universe)):
        raise InvalidArgument(f"mask {mask} out of range for {len(universe)} components")
    return mask


class CoalitionTable:
    """Map from coalition mask to a finite scalar value.

    Values live in a float array indexed by mask; missing coalitions are
    tracked by a presence mask. Instances are read-only after construction.
    """

    def __init__(
        self,
        universe: Sequence[str],
        values: np.ndarray,
        present: Optional[np.ndarray] = None,
        metadata: Optional[Mapping[str, str]] = None,
    ):
        self.universe: Universe = as_universe(universe)
        size = 1 << len(self.universe)
        values = np.array(values, dtype=float)
        if values.shape != (size,):
            raise InvalidArgument(f"expected {size} values, got shape {values.shape}")
        if present is None:
            present = np.ones(size, dtype=bool)
        present = np.array(present, dtype=bool)
        if present.shape != (size,):
            raise InvalidArgument(f"presence mask must have {size} entries")
        if not np.all(np.isfinite(values[present])):
            raise InvalidArgument("coalition values must be finite")
        values[~present] = np.nan
        values.setflags(write=False)
        present.setflags(write=False)
        self._values = values
        self._present = present
        self.metadata: Dict[str, str] = dict(metadata or {})

    @classmethod
    def from_mapping(
        cls,
        universe: Sequence[str],
        entries: Mapping[CoalitionKey, float],
        metadata: Optional[Mapping[str, str]] = None,
    ) -> "CoalitionTable":
        universe = as_universe(universe)
        size = 1 << len(universe)
        values = np.full(size, np.nan)
        present = np.zeros(size, dtype=bool)
        for key, value in entries.items():
            mask = resolve_mask(universe, key)
            values[mask] = float(value)
            present[mask] = True
        return cls(universe, values, present, metadata)

    @classmethod
    def from_function(
        cls,
        universe: Sequence[str],
        func: Callable[[ComponentSet], float],
        metadata: Optional[Mapping[str, str]] = None,
    ) -> "CoalitionTable":
        universe = as_universe(universe)
        values = [func(ComponentSet(universe=universe, mask=mask)) for mask in range(1 << len(universe))]
        return cls(universe, np.array(values, dtype=float), metadata=metadata)

    @property
    def k(self) -> int:
        return len(self.universe)

    @property
    def size(self) -> int:
        return 1 << self.k

    @property
    def values(self) -> np.ndarray:
        """Read-only value array indexed by mask (NaN where missing)."""
        return self._values

    @property
    def present(self) -> np.ndarray:
        return self._present

    @property
    def count_present(self) -> int:
        return int(self._present.sum())

    @property
    def is_complete(self) -> bool:
        return self.count_present == self.size

    def require_complete(self) -> "CoalitionTable":
        if not self.is_complete:
            raise IncompleteTable(self.count_present, self.size)
        return self

    def has(self, key: CoalitionKey) -> bool:
        return bool(self._present[resolve_mask(self.universe, key)])

    def value(self, key: CoalitionKey) -> float:
        mask = resolve_mask(self.universe, key)
        if not self._present[mask]:
            raise MissingCoalition(mask)
        return float(self._values[mask])

    def coalition(self, mask: int) -> ComponentSet:
        return ComponentSet(universe=self.universe, mask=mask)

    def items(self) -> Iterator[Tuple[ComponentSet, float]]:
        """Present coalitions with their values, in canonical mask order."""
        for mask in np.flatnonzero(self._present):
            yield self.coalition(int(mask)), float(self._values[mask])

    def with_values(self, values: np.ndarray, metadata: Optional[Mapping[str, str]] = None) -> "CoalitionTable":
        return CoalitionTable(self.universe, values, self._present, metadata if metadata is not None else self.metadata)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, CoalitionTable):
            return NotImplemented
        return (
            self.universe == other.universe
            and np.array_equal(self._present, other._present)
            and np.array_equal(self._values[self._present], other._values[other._present])
            and self.metadata == other.metadata
        )

    def __repr__(self) -> str:
        return f"CoalitionTable(universe={list(self.universe)}, present={self.count_present}/{self.size})"
