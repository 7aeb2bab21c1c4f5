"""Report documents for analysis results and their text, markdown and JSON
renderings.

Numbers are formatted here and nowhere else: values with VALUE_DECIMALS
decimals, p values with P_DECIMALS. JSON output keeps full precision and is
wrapped as {"schema_version", "kind", "result"}.
"""
import json
import logging
import math
import os
from typing import Any, Dict, List, Optional, Sequence

from jinja2 import Environment, FileSystemLoader, StrictUndefined
from pydantic import BaseModel, ConfigDict

from src.config.config import P_DECIMALS, REPORT_SCHEMA_VERSION, VALUE_DECIMALS
from src.exceptions import InvalidArgument
from src.lattice.interference import DegradationProfile, InterferenceSummary, PartitionSummary
from src.lattice.mobius import HarsanyiSpectrum
from src.lattice.shapley import ShapleyReport
from src.regress.ols import CouplingSpectrum, ModelComparison, RegressionFit
from src.selection.strategies import BestPerSize, GreedyPath, SelectionReport
from src.stats.bootstrap import BootstrapCI
from src.stats.multiplicity import MultipleTestResult
from src.stats.significance import TestResult
from src.submod.audit import SubmodularityAudit, TopViolations, TripleSignificance

logger = logging.getLogger(__name__)

FORMATS = ("text", "markdown", "json")
TEMPLATES_DIR = os.path.join(os.path.dirname(os.path.abspath(__file__)), "templates")

_environment = Environment(
    loader=FileSystemLoader(TEMPLATES_DIR),
    undefined=StrictUndefined,
    trim_blocks=True,
    lstrip_blocks=True,
    keep_trailing_newline=True,
    autoescape=False,
)


def fmt_value(value: Optional[float]) -> str:
    if value is None:
        return "n/a"
    if math.isinf(value):
        return "-inf" if value < 0 else "inf"
    if math.isnan(value):
        return "nan"
    text = f"{value:.{VALUE_DECIMALS}f}"
    return text[1:] if text.startswith("-") and float(text) == 0 else text


def fmt_p(value: Optional[float]) -> str:
    if value is None:
        return "n/a"
    return f"{value:.{P_DECIMALS}f}"


def fmt_pct(value: Optional[float]) -> str:
    if value is None:
        return "n/a"
    return f"{value * 100:.1f}%"


class SummaryItem(BaseModel):
    model_config = ConfigDict(frozen=True)

    label: str
    value: str


class ReportTable(BaseModel):
    model_config = ConfigDict(frozen=True)

    title: str
    headers: List[str]
    rows: List[List[str]]

    @property
    def widths(self) -> List[int]:
        columns = [self.headers] + self.rows
        return [max(len(row[i]) for row in columns) for i in range(len(self.headers))]


class ReportDocument(BaseModel):
    model_config = ConfigDict(frozen=True)

    kind: str
    title: str
    summary: List[SummaryItem] = []
    tables: List[ReportTable] = []
    notes: List[str] = []
    result: Dict[str, Any] = {}


def _items(**pairs: str) -> List[SummaryItem]:
    return [SummaryItem(label=label.replace("_", " "), value=value) for label, value in pairs.items()]


def _jsonable(value: Any) -> Any:
    """Non-finite floats become None so the output is strict JSON."""
    if isinstance(value, float):
        return value if math.isfinite(value) else None
    if isinstance(value, dict):
        return {str(k): _jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_jsonable(v) for v in value]
    return value


def _dump(model: BaseModel) -> Dict[str, Any]:
    return model.model_dump(mode="python")


def shapley_document(report: ShapleyReport) -> ReportDocument:
    shares = report.abs_mass_share or {}
    rows = [
        [name, fmt_value(report.phi[name]), fmt_pct(shares.get(name)) if shares else "n/a"]
        for name in report.universe
    ]
    return ReportDocument(
        kind="shapley",
        title="Exact Shapley values",
        summary=_items(
            method=report.method,
            empty_value=fmt_value(report.empty_value),
            full_value=fmt_value(report.full_value),
            efficiency_gap=f"{report.efficiency_gap:.3e}",
        ),
        tables=[ReportTable(title="Attribution", headers=["component", "phi", "abs share"], rows=rows)],
        result=_dump(report),
    )


def spectrum_document(spectrum: HarsanyiSpectrum, top: int = 10, min_order: int = 2) -> ReportDocument:
    orders = spectrum.order_summary()
    strongest = spectrum.top(top, min_order)
    return ReportDocument(
        kind="mobius",
        title="Harsanyi dividends",
        summary=_items(components=str(spectrum.k), coalitions=str(1 << spectrum.k)),
        tables=[
            ReportTable(
                title="Mass by interaction order",
                headers=["order", "count", "sum", "abs sum"],
                rows=[[str(o.order), str(o.count), fmt_value(o.total), fmt_value(o.abs_total)] for o in orders],
            ),
            ReportTable(
                title=f"Largest dividends of order >= {min_order}",
                headers=["coalition", "order", "dividend"],
                rows=[[d.coalition, str(d.order), fmt_value(d.value)] for d in strongest],
            ),
        ],
        result={
            "dividends": dict(spectrum.items()),
            "orders": [_dump(o) for o in orders],
            "top": [_dump(d) for d in strongest],
        },
    )


def interference_document(
    summary: InterferenceSummary,
    partitions: Sequence[PartitionSummary] = (),
    profile: Optional[DegradationProfile] = None,
) -> ReportDocument:
    tables = [
        ReportTable(
            title="Negative marginals",
            headers=["context", "component", "marginal"],
            rows=[[r.context, r.component, fmt_value(r.value)] for r in summary.pairs],
        )
    ]
    if partitions:
        tables.append(
            ReportTable(
                title="Partition by component",
                headers=["component", "with n", "with mean", "with range", "without n", "without mean"],
                rows=[
                    [
                        p.component,
                        str(p.with_count),
                        fmt_value(p.with_mean),
                        f"{fmt_value(p.with_min)} to {fmt_value(p.with_max)}",
                        str(p.without_count),
                        fmt_value(p.without_mean),
                    ]
                    for p in partitions
                ],
            )
        )
    if profile is not None:
        tables.append(
            ReportTable(
                title=f"Degradation from {profile.base} ({fmt_value(profile.base_value)})",
                headers=["added", "count", "mean", "change"],
                rows=[[str(s.added), str(s.count), fmt_value(s.mean_value), fmt_pct(s.relative_change)] for s in profile.steps],
            )
        )
    result = {"interference": _dump(summary), "partitions": [_dump(p) for p in partitions]}
    if profile is not None:
        result["degradation"] = _dump(profile)
    return ReportDocument(
        kind="marginals",
        title="Marginal contributions",
        summary=_items(pairs=str(summary.n_pairs), negative=str(summary.n_interference), rate=fmt_pct(summary.rate)),
        tables=tables,
        result=result,
    )


def audit_document(audit_result: SubmodularityAudit, top: Optional[TopViolations] = None) -> ReportDocument:
    summary = _items(
        triples=str(audit_result.n_triples),
        violations=str(audit_result.n_violations),
        violation_rate=fmt_pct(audit_result.violation_rate),
        antiviolations=str(audit_result.n_antiviolations),
        sign_flips=str(audit_result.n_sign_flips),
        gamma=audit_result.gamma_definition,
        gamma_median=fmt_value(audit_result.gamma_median),
    )
    tables = [
        ReportTable(
            title="Violations above gap thresholds",
            headers=["gap >", "count"],
            rows=[[fmt_value(t), str(c)] for t, c in zip(audit_result.gap_thresholds, audit_result.gap_counts)],
        )
    ]
    result = {key: value for key, value in _dump(audit_result).items() if key != "triples"}
    result["triples"] = [
        {"S": t.S.label, "T": t.T.label, "i": t.i, "gain_sub": t.gain_sub, "gain_sup": t.gain_sup, "gap": t.gap, "violation": t.violation, "sign_flip": t.sign_flip}
        for t in audit_result.triples
    ]
    if top is not None:
        tables.append(
            ReportTable(
                title="Largest violations",
                headers=["S", "T", "i", "gain(i|S)", "gain(i|T)", "gap", "sign flip"],
                rows=[
                    [t.S.label, t.T.label, t.i, fmt_value(t.gain_sub), fmt_value(t.gain_sup), fmt_value(t.gap), "yes" if t.sign_flip else "no"]
                    for t in top.triples
                ],
            )
        )
        summary.append(SummaryItem(label="top sign-flip fraction", value=fmt_pct(top.sign_flip_fraction)))
        if top.designated is not None:
            summary.append(SummaryItem(label=f"top contexts with {top.designated}", value=fmt_pct(top.designated_context_fraction)))
        result["top"] = {
            "sign_flip_fraction": top.sign_flip_fraction,
            "min_gap": top.min_gap,
            "designated": top.designated,
            "designated_context_fraction": top.designated_context_fraction,
            "triples": [{"S": t.S.label, "T": t.T.label, "i": t.i, "gap": t.gap} for t in top.triples],
        }
    return ReportDocument(kind="audit", title="Submodularity audit", summary=summary, tables=tables, result=result)


def triple_significance_document(result: TripleSignificance) -> ReportDocument:
    rows = [
        [t.S, t.T, t.i, fmt_value(t.mean_gap), fmt_value(t.statistic), fmt_p(t.p_two_sided), fmt_p(t.p_adjusted), "yes" if t.significant else "no"]
        for t in result.tests
    ]
    return ReportDocument(
        kind="triple-tests",
        title="Per-triple gap tests",
        summary=_items(family=str(result.family_size), alpha=fmt_p(result.alpha), significant=f"{result.n_significant} of {len(rows)}"),
        tables=[ReportTable(title="Bonferroni over the triple family", headers=["S", "T", "i", "mean gap", "t", "p", "adjusted", "reject"], rows=rows)],
        result=_dump(result),
    )


def _fit_row(name: str, fit: RegressionFit) -> List[str]:
    return [
        name,
        f"{fit.spec.encoding}/{fit.spec.order}",
        str(fit.p),
        fmt_value(fit.r2),
        fmt_value(fit.adj_r2),
        fmt_value(fit.loocv_r2),
        fmt_value(fit.aic),
        fmt_value(fit.bic),
    ]


FIT_HEADERS = ["model", "design", "params", "R2", "adj R2", "LOOCV R2", "AIC", "BIC"]


def fit_document(fit: RegressionFit, eigen: Optional[CouplingSpectrum] = None) -> ReportDocument:
    tables = [
        ReportTable(title="Fit", headers=FIT_HEADERS, rows=[_fit_row("fit", fit)]),
        ReportTable(
            title="Coefficients",
            headers=["term", "estimate"],
            rows=[[name, fmt_value(value)] for name, value in zip(fit.columns, fit.coefficients)],
        ),
    ]
    result: Dict[str, Any] = {"fit": _dump(fit)}
    notes = []
    if eigen is not None:
        tables.append(_eigen_table(eigen))
        result["couplings"] = _dump(eigen)
        notes.append(f"Coupling eigenvalues: {eigen.n_negative} negative, {eigen.n_positive} positive ({eigen.units} units)")
    return ReportDocument(kind="fit", title="Interaction regression", tables=tables, notes=notes, result=result)


def _eigen_table(eigen: CouplingSpectrum) -> ReportTable:
    rows = [[f"lambda{i + 1}", fmt_value(v)] for i, v in enumerate(eigen.eigenvalues)]
    if eigen.strongest_positive is not None:
        c = eigen.strongest_positive
        rows.append([f"max J({c.a},{c.b})", fmt_value(c.value)])
    if eigen.strongest_negative is not None:
        c = eigen.strongest_negative
        rows.append([f"min J({c.a},{c.b})", fmt_value(c.value)])
    return ReportTable(title="Coupling matrix spectrum", headers=["quantity", "value"], rows=rows)


def comparison_document(comparison: ModelComparison, eigen: Optional[CouplingSpectrum] = None) -> ReportDocument:
    tables = [
        ReportTable(
            title="Models",
            headers=FIT_HEADERS,
            rows=[_fit_row("main", comparison.main), _fit_row("pairwise", comparison.pairwise)],
        )
    ]
    result: Dict[str, Any] = {"comparison": _dump(comparison)}
    if eigen is not None:
        tables.append(_eigen_table(eigen))
        result["couplings"] = _dump(eigen)
    return ReportDocument(
        kind="icompare",
        title="Main effects against pairwise interactions",
        summary=_items(
            delta_AIC=fmt_value(comparison.delta_aic),
            delta_BIC=fmt_value(comparison.delta_bic),
            delta_LOOCV_R2=fmt_value(comparison.delta_loocv_r2),
            preferred_by_AIC=str(comparison.preferred_by_aic),
            preferred_by_BIC=str(comparison.preferred_by_bic),
            preferred_by_LOOCV=str(comparison.preferred_by_loocv),
        ),
        tables=tables,
        notes=["Deltas are pairwise minus main."],
        result=result,
    )


def significance_document(result: TestResult) -> ReportDocument:
    summary = _items(
        test=result.test,
        n=str(result.n),
        statistic=fmt_value(result.statistic),
        df=fmt_value(result.df),
        p_one_sided=fmt_p(result.p_one_sided),
        p_two_sided=fmt_p(result.p_two_sided),
        effect_size=fmt_value(result.effect_size),
        BF10=fmt_value(result.bf10),
        method=result.method,
    )
    return ReportDocument(kind="test", title=f"{result.test} test", summary=summary, notes=list(result.notes), result=_dump(result))


def bayes_factor_document(t: float, n: int, r: float, bf10: float) -> ReportDocument:
    return ReportDocument(
        kind="bf",
        title="JZS Bayes factor",
        summary=_items(t=fmt_value(t), n=str(n), r=fmt_value(r), BF10=f"{bf10:.4g}", BF01=f"{1.0 / bf10:.4g}" if bf10 > 0 else "inf"),
        result={"t": t, "n": n, "r": r, "bf10": bf10},
    )


def multiple_document(pvalues: Sequence[float], result: MultipleTestResult) -> ReportDocument:
    rows = [
        [str(i + 1), fmt_p(p), fmt_p(adj), "yes" if rej else "no"]
        for i, (p, adj, rej) in enumerate(zip(pvalues, result.adjusted, result.reject))
    ]
    return ReportDocument(
        kind="multiplicity",
        title=f"{result.method} correction",
        summary=_items(alpha=fmt_p(result.alpha), rejected=f"{result.n_rejected} of {len(rows)}"),
        tables=[ReportTable(title="Adjusted p values", headers=["#", "p", "adjusted", "reject"], rows=rows)],
        result={"pvalues": list(pvalues), **_dump(result)},
    )


def bootstrap_document(ci: BootstrapCI, label: str = "statistic") -> ReportDocument:
    summary = _items(
        estimate=fmt_value(ci.point_estimate),
        interval=f"[{fmt_value(ci.lo)}, {fmt_value(ci.hi)}]",
        level=fmt_pct(ci.level),
        method=ci.method,
        resamples=str(ci.resamples),
        seed=str(ci.seed),
        units=str(ci.n_units),
    )
    if ci.p_one_sided is not None:
        summary.append(SummaryItem(label="p (bootstrap, one-sided)", value=fmt_p(ci.p_one_sided)))
    if ci.p_one_sided_t is not None:
        summary.append(SummaryItem(label="p (t, one-sided)", value=fmt_p(ci.p_one_sided_t)))
    return ReportDocument(kind="bootstrap", title=f"Bootstrap interval for {label}", summary=summary, notes=list(ci.warnings), result=_dump(ci))


def _optima_table(optima) -> ReportTable:
    return ReportTable(
        title="Best coalition per size",
        headers=["K", "coalition", "value"],
        rows=[[str(o.size), o.coalition, fmt_value(o.value)] for o in optima],
    )


def _greedy_table(path: GreedyPath) -> ReportTable:
    rows = []
    for step in path.steps:
        gains = ", ".join(f"{name} {fmt_value(gain)}" for name, gain in step.marginals.items())
        rows.append([step.coalition, fmt_value(step.value), step.added or "stop", gains])
    return ReportTable(title=f"Greedy path from {path.start}", headers=["coalition", "value", "adds", "marginals"], rows=rows)


def selection_document(report) -> ReportDocument:
    if isinstance(report, BestPerSize):
        return ReportDocument(
            kind="select-best",
            title="Exhaustive selection",
            summary=_items(k_star=str(report.k_star), best=f"{report.best.coalition} ({fmt_value(report.best.value)})"),
            tables=[_optima_table(report.optima)],
            notes=[f"Tie-break: {report.tie_break}"],
            result=_dump(report),
        )
    if isinstance(report, GreedyPath):
        return ReportDocument(
            kind="select-greedy",
            title="Greedy forward selection",
            summary=_items(final=f"{report.final} ({fmt_value(report.final_value)})", steps=str(len(report.steps) - 1)),
            tables=[_greedy_table(report)],
            result=_dump(report),
        )
    if isinstance(report, SelectionReport):
        return ReportDocument(
            kind="select-compare",
            title="Exhaustive against greedy selection",
            summary=_items(
                k_star=str(report.k_star),
                best=f"{report.best.coalition} ({fmt_value(report.best.value)})",
                greedy=f"{report.greedy_final} ({fmt_value(report.greedy_value)})",
                optimality_gap=fmt_value(report.optimality_gap),
                improvement=f"{report.improvement_pct:.1f}%" if report.improvement_pct is not None else "n/a",
                best_vs_full=fmt_pct(report.best_vs_full_gap),
            ),
            tables=[_optima_table(report.best_per_k), _greedy_table(report.greedy_path)],
            notes=[f"Tie-break: {report.tie_break}"],
            result=_dump(report),
        )
    raise InvalidArgument(f"cannot render {type(report).__name__} as a selection report")


def manifest_document(manifest) -> ReportDocument:
    return ReportDocument(
        kind="manifest",
        title="Run manifest",
        summary=_items(mode=manifest.mode, runs=str(len(manifest)), orderings=str(manifest.orderings), seed=str(manifest.seed)),
        tables=[
            ReportTable(
                title="Configurations",
                headers=["id", "coalition", "ordering"],
                rows=[[e.id, e.coalition, " > ".join(e.ordering) or "-"] for e in manifest.configurations],
            )
        ],
        result=_dump(manifest),
    )


def combine(title: str, documents: Sequence[ReportDocument], kind: str = "report") -> ReportDocument:
    """Merge section documents; section summaries become leading tables."""
    tables: List[ReportTable] = []
    notes: List[str] = []
    result: Dict[str, Any] = {}
    for doc in documents:
        if doc.summary:
            tables.append(ReportTable(title=doc.title, headers=["item", "value"], rows=[[s.label, s.value] for s in doc.summary]))
        tables.extend(doc.tables)
        notes.extend(doc.notes)
        result[doc.kind] = doc.result
    return ReportDocument(kind=kind, title=title, tables=tables, notes=notes, result=result)


def render(document: ReportDocument, fmt: str = "text") -> str:
    if fmt not in FORMATS:
        raise InvalidArgument(f"unknown output format {fmt!r}; choose from {FORMATS}")
    if fmt == "json":
        payload = {"schema_version": REPORT_SCHEMA_VERSION, "kind": document.kind, "result": _jsonable(document.result)}
        return json.dumps(payload, indent=2, allow_nan=False) + "\n"
    template = _environment.get_template("report.md.j2" if fmt == "markdown" else "report.txt.j2")
    return template.render(doc=document)
