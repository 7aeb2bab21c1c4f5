"""Bundled coalition tables under data/fixtures, pinned by SHA-256 in
data/fixtures/SHA256SUMS (sha256sum format)."""
import hashlib
import json
import logging
import os
from typing import Dict, List, Optional

from src.datasets.coalition_csv import load_coalition_csv
from src.datasets.files import read_lines
from src.exceptions import ChecksumMismatch, InvalidArgument
from src.lattice.coalition import CoalitionTable

logger = logging.getLogger(__name__)

FIXTURE_DIR = os.path.join(os.path.dirname(os.path.dirname(os.path.dirname(os.path.abspath(__file__)))), "data", "fixtures")
CHECKSUM_FILE = "SHA256SUMS"


def _directory(directory: Optional[str]) -> str:
    return directory or FIXTURE_DIR


def file_sha256(path: str) -> str:
    digest = hashlib.sha256()
    with open(path, "rb") as f:
        for block in iter(lambda: f.read(1 << 16), b""):
            digest.update(block)
    return digest.hexdigest()


def pinned_checksums(directory: Optional[str] = None) -> Dict[str, str]:
    checksums = {}
    for line in read_lines(os.path.join(_directory(directory), CHECKSUM_FILE)):
        if not line.strip():
            continue
        digest, name = line.split(maxsplit=1)
        checksums[name.lstrip("*")] = digest.lower()
    return checksums


def list_fixtures(directory: Optional[str] = None) -> List[str]:
    return sorted(name for name in pinned_checksums(directory) if name.endswith(".csv"))


def _resolve(name: str, directory: Optional[str]) -> str:
    directory = _directory(directory)
    pinned = pinned_checksums(directory)
    if name not in pinned and f"{name}.csv" in pinned:
        name = f"{name}.csv"
    if name not in pinned:
        raise InvalidArgument(f"unknown fixture {name!r}; available: {', '.join(sorted(pinned))}")
    path = os.path.join(directory, name)
    actual = file_sha256(path)
    if actual != pinned[name]:
        logger.error(f"Fixture {name} drifted: expected {pinned[name]}, got {actual}")
        raise ChecksumMismatch(name, pinned[name], actual)
    return path


def load_fixture(name: str, directory: Optional[str] = None) -> CoalitionTable:
    """Load a bundled coalition table by file name (".csv" optional) after
    checking its bytes against the pinned checksum."""
    return load_coalition_csv(_resolve(name, directory))


def load_reference_values(name: str, directory: Optional[str] = None) -> Dict[str, float]:
    """Published reference numbers kept as JSON beside the fixtures."""
    if not name.endswith(".json"):
        name = f"{name}.json"
    with open(_resolve(name, directory), encoding="utf-8") as f:
        return {key: float(value) for key, value in json.load(f).items()}


def verify_fixtures(directory: Optional[str] = None) -> List[str]:
    """Names of pinned files that are missing or whose bytes changed."""
    directory = _directory(directory)
    drifted = []
    for name, digest in sorted(pinned_checksums(directory).items()):
        path = os.path.join(directory, name)
        if not os.path.exists(path) or file_sha256(path) != digest:
            drifted.append(name)
    if drifted:
        logger.warning(f"Fixtures out of date: {', '.join(drifted)}")
    return drifted
