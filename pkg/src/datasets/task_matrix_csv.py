"""task-matrix-csv: one row per task, a "task" column followed by one column
per coalition label ("Bare", "T+SR+R", "All-In"). The universe is declared
in a leading "# universe: A,B,..." line."""
import logging
import math
from typing import Optional, Sequence

import numpy as np

from src.datasets.files import atomic_write_text, format_rows, parse_row, read_lines, split_header
from src.exceptions import DuplicateCoalition, InputError, NonFiniteValue, ParseError
from src.lattice.coalition import as_universe, label_of, parse_component_set
from src.lattice.task_matrix import TaskMatrix

logger = logging.getLogger(__name__)

TASK_COLUMN = "task"
UNIVERSE_KEY = "universe"


def parse_task_matrix_csv(lines: Sequence[str], universe: Optional[Sequence[str]] = None, source: str = "<memory>") -> TaskMatrix:
    metadata, start = split_header(lines)
    declared = metadata.pop(UNIVERSE_KEY, None)
    try:
        if universe is None:
            if declared is None:
                raise ParseError(1, "no universe declared")
            universe = [name.strip() for name in declared.split(",")] if declared else []
        universe = as_universe(universe)
    except ParseError:
        raise
    except InputError as e:
        raise ParseError(1, str(e)) from e
    if start >= len(lines):
        raise ParseError(start + 1, "missing header")
    header = parse_row(lines[start], start + 1)
    if not header or header[0] != TASK_COLUMN:
        raise ParseError(start + 1, f"header must start with {TASK_COLUMN!r}")
    masks = []
    for label in header[1:]:
        try:
            mask = parse_component_set(label, universe).mask
        except InputError as e:
            raise ParseError(start + 1, f"bad coalition label {label!r}: {e}") from e
        if mask in masks:
            raise DuplicateCoalition(mask, start + 1)
        masks.append(mask)
    units = []
    rows = []
    for index in range(start + 1, len(lines)):
        number = index + 1
        cells = parse_row(lines[index], number)
        if len(cells) != len(header):
            raise ParseError(number, f"expected {len(header)} cells, got {len(cells)}")
        row = []
        for cell in cells[1:]:
            try:
                value = float(cell)
            except ValueError:
                raise ParseError(number, f"bad value {cell!r}") from None
            if not math.isfinite(value):
                raise NonFiniteValue(number)
            row.append(value)
        units.append(cells[0])
        rows.append(row)
    if len(set(units)) != len(units):
        raise ParseError(start + 2, "task labels must be unique")
    size = 1 << len(universe)
    values = np.full((len(units), size), np.nan)
    present = np.zeros(size, dtype=bool)
    if masks:
        values[:, masks] = np.array(rows, dtype=float).reshape(len(units), len(masks))
        present[masks] = True
    matrix = TaskMatrix(universe, units, values, present, metadata)
    logger.info(f"Loaded {matrix.n_units} tasks over {len(masks)} coalitions from {source}")
    return matrix


def load_task_matrix_csv(path: str, universe: Optional[Sequence[str]] = None) -> TaskMatrix:
    return parse_task_matrix_csv(read_lines(path), universe, source=path)


def format_task_matrix_csv(matrix: TaskMatrix) -> str:
    masks = np.flatnonzero(matrix.present)
    metadata = {UNIVERSE_KEY: ",".join(matrix.universe), **matrix.metadata}
    rows = [[TASK_COLUMN] + [label_of(matrix.universe, int(mask)) for mask in masks]]
    for unit, values in zip(matrix.units, matrix.values):
        rows.append([unit] + [repr(float(values[mask])) for mask in masks])
    return format_rows(metadata, rows)


def save_task_matrix_csv(matrix: TaskMatrix, path: str) -> None:
    atomic_write_text(path, format_task_matrix_csv(matrix))
    logger.info(f"Saved {matrix.n_units} tasks to {path}")
