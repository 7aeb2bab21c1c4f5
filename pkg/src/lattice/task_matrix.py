"""Per-unit scores over coalitions: the resampling substrate for bootstrap
procedures and paired tests. Rows are units (tasks or seeds), columns are
coalition masks in canonical order."""
import logging
from typing import Mapping, Optional, Sequence

import numpy as np

from src.exceptions import IncompleteMatrix, InvalidArgument, MissingCoalition
from src.lattice.coalition import (
    CoalitionKey,
    CoalitionTable,
    ComponentSet,
    Universe,
    as_universe,
    resolve_mask,
)

logger = logging.getLogger(__name__)


def submasks(mask: int) -> np.ndarray:
    """All submasks of ``mask`` (including 0 and ``mask``), ascending."""
    subs = []
    sub = mask
    while True:
        subs.append(sub)
        if sub == 0:
            break
        sub = (sub - 1) & mask
    return np.array(sorted(subs), dtype=np.int64)


class TaskMatrix:
    def __init__(
        self,
        universe: Sequence[str],
        units: Sequence[str],
        values: np.ndarray,
        present: Optional[np.ndarray] = None,
        metadata: Optional[Mapping[str, str]] = None,
    ):
        self.universe: Universe = as_universe(universe)
        size = 1 << len(self.universe)
        values = np.array(values, dtype=float)
        if values.ndim != 2 or values.shape != (len(units), size):
            raise InvalidArgument(f"expected a {len(units)}x{size} matrix, got shape {values.shape}")
        if len(set(units)) != len(units):
            raise InvalidArgument("unit labels must be unique")
        if present is None:
            present = np.ones(size, dtype=bool)
        present = np.array(present, dtype=bool)
        if present.shape != (size,):
            raise InvalidArgument(f"expected {size} presence flags, got shape {present.shape}")
        if not np.all(np.isfinite(values[:, present])):
            raise InvalidArgument("task matrix values must be finite")
        values[:, ~present] = np.nan
        values.setflags(write=False)
        present.setflags(write=False)
        self.units = tuple(str(unit) for unit in units)
        self._values = values
        self._present = present
        self.metadata = dict(metadata or {})

    @classmethod
    def from_columns(
        cls,
        universe: Sequence[str],
        units: Sequence[str],
        columns: Mapping[CoalitionKey, Sequence[float]],
        metadata: Optional[Mapping[str, str]] = None,
    ) -> "TaskMatrix":
        universe = as_universe(universe)
        size = 1 << len(universe)
        values = np.full((len(units), size), np.nan)
        present = np.zeros(size, dtype=bool)
        for key, column in columns.items():
            mask = resolve_mask(universe, key)
            values[:, mask] = np.asarray(column, dtype=float)
            present[mask] = True
        return cls(universe, units, values, present, metadata)

    @classmethod
    def from_tables(cls, tables: Sequence[CoalitionTable], units: Optional[Sequence[str]] = None) -> "TaskMatrix":
        """Stack one coalition table per unit."""
        if not tables:
            raise InvalidArgument("at least one table is required")
        universe = tables[0].universe
        present = tables[0].present.copy()
        for table in tables[1:]:
            if table.universe != universe:
                raise InvalidArgument("all tables must share one universe")
            present &= table.present
        units = list(units) if units is not None else [f"task-{i}" for i in range(len(tables))]
        values = np.vstack([np.asarray(table.values) for table in tables])
        return cls(universe, units, values, present)

    @property
    def k(self) -> int:
        return len(self.universe)

    @property
    def n_units(self) -> int:
        return len(self.units)

    @property
    def values(self) -> np.ndarray:
        return self._values

    @property
    def present(self) -> np.ndarray:
        return self._present

    @property
    def is_complete(self) -> bool:
        return bool(self._present.all())

    def require_complete(self) -> "TaskMatrix":
        missing = int((~self._present).sum())
        if missing:
            raise IncompleteMatrix(missing)
        return self

    def require_sublattice(self, coalition: ComponentSet) -> "TaskMatrix":
        """Every subset of ``coalition`` must be a column."""
        missing = int((~self._present[submasks(coalition.mask)]).sum())
        if missing:
            raise IncompleteMatrix(missing)
        return self

    def column(self, key: CoalitionKey) -> np.ndarray:
        mask = resolve_mask(self.universe, key)
        if not self._present[mask]:
            raise MissingCoalition(mask)
        return self._values[:, mask]

    def mean_table(self, rows: Optional[np.ndarray] = None) -> CoalitionTable:
        """Coalition table of column means, optionally over a row selection
        (with repeats, as produced by a cluster resample)."""
        block = self._values if rows is None else self._values[rows]
        means = np.full(1 << self.k, np.nan)
        means[self._present] = block[:, self._present].mean(axis=0)
        return CoalitionTable(self.universe, means, self._present, self.metadata)

    def unit_table(self, row: int) -> CoalitionTable:
        return CoalitionTable(self.universe, self._values[row], self._present, {"unit": self.units[row]})

    def __repr__(self) -> str:
        return f"TaskMatrix(universe={list(self.universe)}, units={self.n_units}, columns={int(self._present.sum())})"
