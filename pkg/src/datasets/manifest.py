"""Factorial run manifests: which coalitions to evaluate, in which component
orderings, under which seeds. Stored as schema-versioned JSON."""
import itertools
import logging
import math
from typing import List, Literal, Optional, Sequence

from pydantic import BaseModel, ConfigDict, ValidationError, field_validator, model_validator

from src.config.config import DEFAULT_SEED, MAX_COMPONENTS, REPORT_SCHEMA_VERSION
from src.datasets.files import atomic_write_text, read_lines
from src.exceptions import InvalidArgument, ParseError, UniverseTooLarge
from src.lattice.coalition import ComponentSet, CoalitionKey, Universe, as_universe, resolve_mask
from src.stats.rng import check_seed, keyed_rng

logger = logging.getLogger(__name__)

Mode = Literal["full-factorial", "listed"]


class ManifestEntry(BaseModel):
    model_config = ConfigDict(frozen=True)

    id: str
    coalition: str
    mask: int
    ordering: List[str]


class Manifest(BaseModel):
    model_config = ConfigDict(frozen=True)

    schema_version: int = REPORT_SCHEMA_VERSION
    universe: Universe
    mode: Mode
    orderings: int
    seed: int
    seeds: List[int]
    notes: str = ""
    configurations: List[ManifestEntry]

    @field_validator("universe", mode="before")
    @classmethod
    def _universe(cls, value):
        return as_universe(value)

    @model_validator(mode="after")
    def _check(self) -> "Manifest":
        if self.schema_version != REPORT_SCHEMA_VERSION:
            raise ValueError(f"unsupported schema version {self.schema_version}")
        ids = [entry.id for entry in self.configurations]
        if len(set(ids)) != len(ids):
            raise ValueError("configuration ids must be unique")
        for entry in self.configurations:
            members = ComponentSet(universe=self.universe, mask=entry.mask).members
            if sorted(entry.ordering) != sorted(members):
                raise ValueError(f"ordering of {entry.id} is not a permutation of its components")
        return self

    def __len__(self) -> int:
        return len(self.configurations)


def _orderings(members: List[str], wanted: int, seed: int, index: int) -> List[List[str]]:
    """Up to ``wanted`` distinct orderings of ``members``, universe order first.

    A configuration with fewer than ``wanted`` distinct orderings gets all of
    them in lexicographic position order.
    """
    if wanted >= math.factorial(len(members)):
        return [list(p) for p in itertools.permutations(members)]
    found = [members]
    seen = {tuple(members)}
    draw = 1
    while len(found) < wanted:
        candidate = [members[i] for i in keyed_rng(seed, index, draw).permutation(len(members))]
        draw += 1
        if tuple(candidate) not in seen:
            seen.add(tuple(candidate))
            found.append(candidate)
    return found


def gen_manifest(
    universe: Sequence[str],
    mode: str = "full-factorial",
    orderings: int = 1,
    seed: int = DEFAULT_SEED,
    listed: Optional[Sequence[CoalitionKey]] = None,
    seeds: Optional[Sequence[int]] = None,
    notes: str = "",
) -> Manifest:
    """Enumerate configurations to run.

    Ordering 0 of every configuration lists its components in universe
    order; further orderings are distinct permutations drawn from the stream
    keyed by (seed, configuration index, draw). A configuration gets at most
    as many orderings as it has distinct ones, so small coalitions yield
    fewer runs than ``orderings``.
    """
    if len(universe) > MAX_COMPONENTS:
        raise UniverseTooLarge(len(universe), MAX_COMPONENTS)
    universe = as_universe(universe)
    seed = check_seed(seed)
    if orderings < 1:
        raise InvalidArgument("orderings must be at least 1")
    if mode == "full-factorial":
        if listed is not None:
            raise InvalidArgument("listed coalitions only apply to listed mode")
        masks = list(range(1 << len(universe)))
    elif mode == "listed":
        if not listed:
            raise InvalidArgument("listed mode needs at least one coalition")
        masks = [resolve_mask(universe, key) for key in listed]
        if len(set(masks)) != len(masks):
            raise InvalidArgument("listed coalitions must be distinct")
    else:
        raise InvalidArgument(f"unknown manifest mode {mode!r}")

    entries = []
    for index, mask in enumerate(masks):
        coalition = ComponentSet(universe=universe, mask=mask)
        for j, ordering in enumerate(_orderings(list(coalition.members), orderings, seed, index)):
            entries.append(ManifestEntry(id=f"{coalition.label}/o{j}", coalition=coalition.label, mask=mask, ordering=ordering))
    manifest = Manifest(
        universe=universe,
        mode=mode,
        orderings=orderings,
        seed=seed,
        seeds=[check_seed(s) for s in seeds] if seeds is not None else [seed],
        notes=notes,
        configurations=entries,
    )
    logger.info(f"Manifest with {len(entries)} runs over {len(masks)} configurations")
    return manifest


def format_manifest(manifest: Manifest) -> str:
    return manifest.model_dump_json(indent=2) + "\n"


def save_manifest(manifest: Manifest, path: str) -> None:
    atomic_write_text(path, format_manifest(manifest))
    logger.info(f"Saved manifest with {len(manifest)} runs to {path}")


def load_manifest(path: str) -> Manifest:
    text = "\n".join(read_lines(path))
    if not text.strip():
        raise ParseError(1, "empty manifest")
    try:
        return Manifest.model_validate_json(text)
    except ValidationError as e:
        logger.error(f"Error parsing manifest {path}: {str(e)}")
        raise ParseError(1, f"invalid manifest: {e.errors()[0]['msg']}") from e
