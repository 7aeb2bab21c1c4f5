import csv
import io
import logging
import os
import tempfile
from typing import Dict, List, Mapping, Sequence, Tuple

from src.exceptions import ParseError

logger = logging.getLogger(__name__)


def atomic_write_text(path: str, text: str) -> None:
    """Write ``text`` to a temporary file beside ``path`` and rename it over."""
    directory = os.path.dirname(os.path.abspath(path))
    os.makedirs(directory, exist_ok=True)
    handle, temp_path = tempfile.mkstemp(dir=directory, prefix=".tmp-", suffix=os.path.basename(path))
    try:
        with os.fdopen(handle, "w", encoding="utf-8", newline="") as f:
            f.write(text)
        os.replace(temp_path, path)
    except Exception as e:
        logger.error(f"Error writing {path}: {str(e)}")
        if os.path.exists(temp_path):
            os.remove(temp_path)
        raise


def read_lines(path: str) -> List[str]:
    try:
        with open(path, encoding="utf-8", newline="") as f:
            return f.read().splitlines()
    except OSError as e:
        logger.error(f"Error reading {path}: {str(e)}")
        raise


def split_header(lines: Sequence[str]) -> Tuple[Dict[str, str], int]:
    """Leading "# key: value" lines as metadata, and the index of the first
    data line. Comment lines without a key are skipped."""
    metadata: Dict[str, str] = {}
    index = 0
    while index < len(lines) and lines[index].startswith("#"):
        body = lines[index][1:].strip()
        if ":" in body:
            key, value = body.split(":", 1)
            metadata[key.strip()] = value.strip()
        index += 1
    return metadata, index


def parse_row(line: str, number: int) -> List[str]:
    try:
        return next(csv.reader([line]))
    except (csv.Error, StopIteration):
        raise ParseError(number) from None


def format_rows(metadata: Mapping[str, str], rows: Sequence[Sequence[str]]) -> str:
    out = io.StringIO()
    for key, value in metadata.items():
        out.write(f"# {key}: {value}\n")
    writer = csv.writer(out, lineterminator="\n")
    writer.writerows(rows)
    return out.getvalue()
