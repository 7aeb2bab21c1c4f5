import sys
import os

# Add the project root directory to Python path
sys.path.insert(0, os.path.abspath(os.path.join(os.path.dirname(__file__), '..')))

import argparse
import json
import logging
from typing import Optional, Sequence

from src.config.config import (
    BCA_RESAMPLES,
    CLUSTER_RESAMPLES,
    DEFAULT_CAUCHY_SCALE,
    DEFAULT_CONFIDENCE,
    DEFAULT_GAP_THRESHOLDS,
    DEFAULT_RESAMPLES,
    DEFAULT_SEED,
)
from src.datasets import (
    gen_manifest,
    load_coalition_csv,
    load_fixture,
    load_task_matrix_csv,
    save_manifest,
)
from src.datasets.files import atomic_write_text
from src.exceptions import InvalidArgument, LatticeError
from src.lattice import (
    CoalitionTable,
    interference_pairs,
    mobius_transform,
    parse_component_set,
    partition_by_component,
    degradation_profile,
    shapley,
)
from src.regress import DesignSpec, build_design, compare_models, coupling_eigen, fit_ols
from src.reporting import (
    FORMATS,
    audit_document,
    bayes_factor_document,
    bootstrap_document,
    combine,
    comparison_document,
    fit_document,
    interference_document,
    manifest_document,
    multiple_document,
    render,
    selection_document,
    shapley_document,
    significance_document,
    spectrum_document,
    triple_significance_document,
)
from src.selection import best_per_k, compare_strategies, greedy_forward
from src.stats import (
    PairedSample,
    bh,
    bootstrap_ci,
    harsanyi_bootstrap,
    holm,
    jzs_bf10,
    mcnemar_exact,
    paired_t,
    wilcoxon_exact,
)
from src.submod import (
    audit,
    cluster_bootstrap_gamma_median,
    cluster_bootstrap_violation_rate,
    top_violations,
    triple_significance,
)

logger = logging.getLogger(__name__)

LOG_FORMAT = '%(asctime)s - %(name)s - %(levelname)s - %(message)s'


def load_table(source: str) -> CoalitionTable:
    """A coalition-csv path, or the name of a bundled fixture."""
    if os.path.exists(source):
        return load_coalition_csv(source)
    return load_fixture(source)


def _resamples(args, default: int) -> int:
    return args.resamples if args.resamples is not None else default


def _coalition(table_or_universe, label: Optional[str]):
    if label is None:
        return None
    universe = getattr(table_or_universe, "universe", table_or_universe)
    return parse_component_set(label, universe)


def cmd_shapley(args):
    return shapley_document(shapley(load_table(args.table), method=args.method))


def cmd_mobius(args):
    return spectrum_document(mobius_transform(load_table(args.table)), top=args.top, min_order=args.min_order)


def cmd_marginals(args):
    table = load_table(args.table)
    partitions = [partition_by_component(table, name) for name in (args.partition or [])]
    profile = degradation_profile(table, _coalition(table, args.base)) if args.base else None
    return interference_document(interference_pairs(table), partitions, profile)


def cmd_audit(args):
    if args.significance and not args.matrix:
        raise InvalidArgument("--significance needs --matrix")
    if args.matrix:
        matrix = load_task_matrix_csv(args.table)
        table = matrix.mean_table()
    else:
        matrix = None
        table = load_table(args.table)
    result = audit(table, gap_thresholds=args.thresholds, gamma_variant=args.gamma)
    top = top_violations(result, args.top, args.designated)
    doc = audit_document(result, top)
    if matrix is None:
        return doc
    resamples = _resamples(args, CLUSTER_RESAMPLES)
    rate = cluster_bootstrap_violation_rate(matrix, resamples, args.seed, workers=args.threads)
    gamma = cluster_bootstrap_gamma_median(matrix, resamples, args.seed, gamma_variant=args.gamma, workers=args.threads)
    sections = [
        doc,
        bootstrap_document(rate, "violation rate").model_copy(update={"kind": "violation-rate"}),
        bootstrap_document(gamma, "median gamma").model_copy(update={"kind": "gamma-median"}),
    ]
    if args.significance:
        sections.append(triple_significance_document(triple_significance(matrix, top.triples, args.alpha)))
    return combine(
        "Submodularity audit with task bootstrap",
        sections,
        kind="audit",
    )


def cmd_fit(args):
    table = load_table(args.table)
    encoding = args.encoding or ("binary" if args.order == "main" else "spin")
    fit = fit_ols(build_design(table, DesignSpec(universe=table.universe, encoding=encoding, order=args.order)))
    eigen = coupling_eigen(fit) if args.order == "pairwise" and table.k >= 2 else None
    return fit_document(fit, eigen)


def cmd_icompare(args):
    comparison = compare_models(load_table(args.table))
    return comparison_document(comparison, coupling_eigen(comparison.pairwise))


def _paired(args) -> PairedSample:
    if args.diffs:
        return PairedSample.from_arrays(args.diffs, [0.0] * len(args.diffs))
    if not (args.matrix and args.a and args.b):
        raise InvalidArgument("give --diffs, or --matrix with --a and --b")
    return PairedSample.from_matrix(load_task_matrix_csv(args.matrix), args.a, args.b)


def cmd_stats(args):
    test = args.test
    if test == "t":
        sample = _paired(args)
        return significance_document(paired_t(sample, cauchy_scale=args.cauchy_scale))
    if test == "wilcoxon":
        return significance_document(wilcoxon_exact(_paired(args), alternative=args.alternative))
    if test == "mcnemar":
        return significance_document(mcnemar_exact(args.b_count, args.c_count))
    if test == "bf":
        return bayes_factor_document(args.t, args.n, args.cauchy_scale, jzs_bf10(args.t, args.n, args.cauchy_scale))
    if test in ("holm", "bh"):
        method = holm if test == "holm" else bh
        return multiple_document(args.pvalues, method(args.pvalues, args.alpha))
    if test == "boot":
        if args.matrix and args.coalition:
            matrix = load_task_matrix_csv(args.matrix)
            coalition = _coalition(matrix, args.coalition)
            ci = harsanyi_bootstrap(
                matrix, coalition, method=args.method, level=args.level,
                resamples=_resamples(args, BCA_RESAMPLES), seed=args.seed, workers=args.threads,
            )
            return bootstrap_document(ci, f"dividend of {coalition.label}")
        if args.values:
            ci = bootstrap_ci(args.values, method=args.method, level=args.level, resamples=_resamples(args, DEFAULT_RESAMPLES), seed=args.seed, workers=args.threads)
            return bootstrap_document(ci, "mean")
        raise InvalidArgument("give --values, or --matrix with --coalition")
    raise InvalidArgument(f"unknown test {test!r}")


def cmd_select(args):
    table = load_table(args.table)
    start = _coalition(table, args.start)
    if args.strategy == "best":
        return selection_document(best_per_k(table))
    if args.strategy == "greedy":
        return selection_document(greedy_forward(table, start))
    return selection_document(compare_strategies(table, start))


def cmd_gen_manifest(args):
    universe = [name.strip() for name in args.components.split(",") if name.strip()]
    manifest = gen_manifest(
        universe,
        mode=args.mode,
        orderings=args.orderings,
        seed=args.seed,
        listed=args.listed,
        seeds=args.seeds,
    )
    if args.manifest_out:
        save_manifest(manifest, args.manifest_out)
    return manifest_document(manifest)


def cmd_report(args):
    table = load_table(args.table)
    sections = [
        shapley_document(shapley(table)),
        spectrum_document(mobius_transform(table)),
        interference_document(interference_pairs(table), [partition_by_component(table, n) for n in table.universe]),
    ]
    if table.k >= 2:
        result = audit(table)
        sections.append(audit_document(result, top_violations(result, args.top, args.designated)))
        comparison = compare_models(table)
        sections.append(comparison_document(comparison, coupling_eigen(comparison.pairwise)))
    sections.append(selection_document(compare_strategies(table)))
    title = table.metadata.get("source", os.path.basename(args.table))
    return combine(f"Coalition analysis: {title}", sections)


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=DEFAULT_SEED, help="base seed for resampling")
    common.add_argument("--resamples", type=int, default=None, help="bootstrap resamples (command default if omitted)")
    common.add_argument("--threads", type=int, default=None, help="bootstrap worker threads (default: LATTICE_THREADS)")
    common.add_argument("--format", choices=FORMATS, default="text", dest="fmt")
    common.add_argument("--out", default=None, help="write the report here instead of standard output")
    common.add_argument("--verbose", action="store_true")

    parser = argparse.ArgumentParser(prog="coalition-lattice", description="Attribution and interaction analysis over coalition lattices")
    commands = parser.add_subparsers(dest="command", required=True)

    p = commands.add_parser("shapley", parents=[common], help="exact Shapley values")
    p.add_argument("table")
    p.add_argument("--method", choices=["weights", "dividends"], default="weights")
    p.set_defaults(handler=cmd_shapley)

    p = commands.add_parser("mobius", parents=[common], help="Harsanyi dividends")
    p.add_argument("table")
    p.add_argument("--top", type=int, default=10)
    p.add_argument("--min-order", type=int, default=2)
    p.set_defaults(handler=cmd_mobius)

    p = commands.add_parser("marginals", parents=[common], help="marginal contributions and interference")
    p.add_argument("table")
    p.add_argument("--partition", nargs="*", metavar="COMPONENT")
    p.add_argument("--base", default=None, help="coalition label for the degradation profile")
    p.set_defaults(handler=cmd_marginals)

    p = commands.add_parser("audit", parents=[common], help="submodularity audit")
    p.add_argument("table")
    p.add_argument("--matrix", action="store_true", help="TABLE is a task-matrix csv; adds cluster bootstrap intervals")
    p.add_argument("--thresholds", type=float, nargs="*", default=list(DEFAULT_GAP_THRESHOLDS))
    p.add_argument("--gamma", choices=["positive-gains", "violations-only"], default="positive-gains")
    p.add_argument("--top", type=int, default=20)
    p.add_argument("--significance", action="store_true", help="t test each listed violation across tasks (needs --matrix)")
    p.add_argument("--alpha", type=float, default=0.05)
    p.add_argument("--designated", default=None)
    p.set_defaults(handler=cmd_audit)

    p = commands.add_parser("fit", parents=[common], help="interaction regression")
    p.add_argument("table")
    p.add_argument("--order", choices=["main", "pairwise", "full"], default="main")
    p.add_argument("--encoding", choices=["binary", "spin"], default=None)
    p.set_defaults(handler=cmd_fit)

    p = commands.add_parser("icompare", parents=[common], help="main effects against pairwise model")
    p.add_argument("table")
    p.set_defaults(handler=cmd_icompare)

    p = commands.add_parser("stats", parents=[common], help="significance tests and intervals")
    p.add_argument("test", choices=["t", "wilcoxon", "mcnemar", "bf", "holm", "bh", "boot"])
    p.add_argument("--diffs", type=float, nargs="+")
    p.add_argument("--matrix", default=None, help="task-matrix csv")
    p.add_argument("--a", default=None, help="coalition label of the first configuration")
    p.add_argument("--b", default=None, help="coalition label of the second configuration")
    p.add_argument("--alternative", choices=["greater", "less"], default="greater")
    p.add_argument("--b-count", type=int, default=0)
    p.add_argument("--c-count", type=int, default=0)
    p.add_argument("--t", type=float, default=0.0)
    p.add_argument("--n", type=int, default=0)
    p.add_argument("--cauchy-scale", type=float, default=DEFAULT_CAUCHY_SCALE)
    p.add_argument("--pvalues", type=float, nargs="*", default=[])
    p.add_argument("--alpha", type=float, default=0.05)
    p.add_argument("--values", type=float, nargs="+")
    p.add_argument("--coalition", default=None)
    p.add_argument("--method", choices=["percentile", "bca"], default="bca")
    p.add_argument("--level", type=float, default=DEFAULT_CONFIDENCE)
    p.set_defaults(handler=cmd_stats)

    p = commands.add_parser("select", parents=[common], help="subset selection")
    p.add_argument("strategy", choices=["best", "greedy", "compare"])
    p.add_argument("table")
    p.add_argument("--start", default=None, help="greedy start coalition")
    p.set_defaults(handler=cmd_select)

    p = commands.add_parser("gen-manifest", parents=[common], help="factorial run manifest")
    p.add_argument("--components", required=True, help="comma-separated component names")
    p.add_argument("--mode", choices=["full-factorial", "listed"], default="full-factorial")
    p.add_argument("--listed", nargs="*", default=None, metavar="LABEL")
    p.add_argument("--orderings", type=int, default=1)
    p.add_argument("--seeds", type=int, nargs="*", default=None)
    p.add_argument("--manifest-out", default=None, help="save the manifest JSON here")
    p.set_defaults(handler=cmd_gen_manifest)

    p = commands.add_parser("report", parents=[common], help="full analysis of one coalition table")
    p.add_argument("table")
    p.add_argument("--top", type=int, default=20)
    p.add_argument("--designated", default=None)
    p.set_defaults(handler=cmd_report)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        level=logging.DEBUG if args.verbose else logging.WARNING,
        format=LOG_FORMAT,
        stream=sys.stderr,
    )
    try:
        document = args.handler(args)
        text = render(document, args.fmt)
        if args.out:
            atomic_write_text(args.out, text)
            logger.info(f"Report written to {args.out}")
        else:
            sys.stdout.write(text)
        return 0
    except LatticeError as e:
        logger.debug(f"{args.command} failed", exc_info=True)
        if args.fmt == "json":
            sys.stderr.write(json.dumps(e.to_dict(), default=str) + "\n")
        else:
            sys.stderr.write(f"error: {e.message}\n")
        return e.exit_code


if __name__ == "__main__":
    sys.exit(main())
