import os
import sys
import logging
import argparse
from typing import Dict, List

# Add the project root to the Python path
sys.path.append(os.path.dirname(os.path.dirname(os.path.dirname(os.path.abspath(__file__)))))

from src.datasets import list_fixtures, load_fixture, load_reference_values, verify_fixtures
from src.datasets.files import atomic_write_text
from src.exceptions import LatticeError
from src.lattice import CoalitionTable, interference_pairs, mobius_transform, partition_by_component, shapley
from src.regress import compare_models, coupling_eigen
from src.reporting import (
    audit_document,
    combine,
    comparison_document,
    interference_document,
    render,
    selection_document,
    shapley_document,
    spectrum_document,
)
from src.selection import compare_strategies
from src.submod import audit, top_violations

logging.basicConfig(level=logging.INFO, format='%(asctime)s - %(name)s - %(levelname)s - %(message)s')
logger = logging.getLogger(__name__)

DESIGNATED = "T"
REFERENCE_TOLERANCE = 0.002


def check_reference(name: str, table: CoalitionTable) -> List[str]:
    """Components whose Shapley value is off the published reference."""
    stem = name[:-len(".csv")] if name.endswith(".csv") else name
    try:
        reference = load_reference_values(f"{stem}_shapley")
    except LatticeError:
        logger.info(f"No reference values for {stem}")
        return []
    phi = shapley(table).phi
    off = [c for c, value in reference.items() if abs(phi[c] - value) > REFERENCE_TOLERANCE]
    for component in off:
        logger.warning(f"{stem}: phi[{component}] = {phi[component]:.4f}, reference {reference[component]:.4f}")
    return off


def analyze(table: CoalitionTable, title: str):
    result = audit(table)
    designated = DESIGNATED if DESIGNATED in table.universe else None
    comparison = compare_models(table)
    return combine(
        title,
        [
            shapley_document(shapley(table)),
            spectrum_document(mobius_transform(table)),
            interference_document(interference_pairs(table), [partition_by_component(table, n) for n in table.universe]),
            audit_document(result, top_violations(result, 20, designated)),
            comparison_document(comparison, coupling_eigen(comparison.pairwise)),
            selection_document(compare_strategies(table)),
        ],
    )


def main(argv=None) -> Dict[str, str]:
    """Write one markdown report per bundled fixture."""
    parser = argparse.ArgumentParser(description="Analyze every bundled coalition table")
    parser.add_argument("--out-dir", default="reports")
    args = parser.parse_args(argv)
    try:
        drifted = verify_fixtures()
        if drifted:
            raise SystemExit(f"fixtures changed on disk: {', '.join(drifted)}")
        os.makedirs(args.out_dir, exist_ok=True)
        written = {}
        for name in list_fixtures():
            table = load_fixture(name)
            check_reference(name, table)
            title = table.metadata.get("source", name)
            path = os.path.join(args.out_dir, name.replace(".csv", ".md"))
            atomic_write_text(path, render(analyze(table, f"Coalition analysis: {title}"), "markdown"))
            written[name] = path
            logger.info(f"Wrote {path}")
        return written
    except LatticeError as e:
        logger.error(f"Error analyzing fixtures: {e}")
        raise


if __name__ == "__main__":
    main()
