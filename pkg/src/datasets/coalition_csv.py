"""coalition-csv: a header of component names plus "value", then one row per
coalition with 0/1 membership cells. Optional leading "# key: value" lines
carry table metadata."""
import logging
import math

import numpy as np

from src.datasets.files import atomic_write_text, format_rows, parse_row, read_lines, split_header
from src.exceptions import DuplicateCoalition, InputError, NonFiniteValue, ParseError
from src.lattice.coalition import CoalitionTable, as_universe

logger = logging.getLogger(__name__)

VALUE_COLUMN = "value"


def parse_coalition_csv(lines, source: str = "<memory>") -> CoalitionTable:
    metadata, start = split_header(lines)
    if start >= len(lines) or not lines[start].strip():
        raise ParseError(start + 1, "missing header")
    header = parse_row(lines[start], start + 1)
    if not header or header[-1] != VALUE_COLUMN:
        raise ParseError(start + 1, f"header must end with {VALUE_COLUMN!r}")
    try:
        universe = as_universe(header[:-1])
    except InputError as e:
        raise ParseError(start + 1, str(e)) from e
    k = len(universe)
    values = np.full(1 << k, np.nan)
    present = np.zeros(1 << k, dtype=bool)
    for index in range(start + 1, len(lines)):
        number = index + 1
        cells = parse_row(lines[index], number)
        if len(cells) != k + 1:
            raise ParseError(number, f"expected {k + 1} cells, got {len(cells)}")
        mask = 0
        for bit, cell in enumerate(cells[:-1]):
            if cell not in ("0", "1"):
                raise ParseError(number, f"membership cell must be 0 or 1, got {cell!r}")
            if cell == "1":
                mask |= 1 << bit
        try:
            value = float(cells[-1])
        except ValueError:
            raise ParseError(number, f"bad value {cells[-1]!r}") from None
        if not math.isfinite(value):
            raise NonFiniteValue(number)
        if present[mask]:
            raise DuplicateCoalition(mask, number)
        values[mask] = value
        present[mask] = True
    table = CoalitionTable(universe, values, present, metadata)
    logger.info(f"Loaded {table.count_present} of {table.size} coalitions from {source}")
    return table


def load_coalition_csv(path: str) -> CoalitionTable:
    return parse_coalition_csv(read_lines(path), source=path)


def format_coalition_csv(table: CoalitionTable) -> str:
    """Canonical text: metadata, header, present coalitions in mask order,
    values in shortest round-trip float form."""
    rows = [list(table.universe) + [VALUE_COLUMN]]
    for mask in np.flatnonzero(table.present):
        cells = ["1" if mask >> bit & 1 else "0" for bit in range(table.k)]
        rows.append(cells + [repr(float(table.values[mask]))])
    return format_rows(table.metadata, rows)


def save_coalition_csv(table: CoalitionTable, path: str) -> None:
    atomic_write_text(path, format_coalition_csv(table))
    logger.info(f"Saved {table.count_present} coalitions to {path}")
