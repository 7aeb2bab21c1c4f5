import json

import pytest

from src.datasets import gen_manifest
from src.exceptions import InvalidArgument
from src.lattice import interference_pairs, mobius_transform, shapley
from src.regress import DesignSpec, build_design, compare_models, coupling_eigen, fit_ols
from src.reporting import (
    audit_document,
    bayes_factor_document,
    combine,
    comparison_document,
    fit_document,
    fmt_p,
    fmt_value,
    interference_document,
    manifest_document,
    multiple_document,
    render,
    selection_document,
    shapley_document,
    significance_document,
    spectrum_document,
)
from src.selection import best_per_k, compare_strategies, greedy_forward
from src.stats import holm, mcnemar_exact
from src.submod import audit, top_violations


def test_number_formatting():
    """Fixed decimals, no negative zero, and n/a for missing values."""
    assert fmt_value(0.17712) == "0.177"
    assert fmt_value(-0.0001) == "0.000"
    assert fmt_value(None) == "n/a"
    assert fmt_value(float("-inf")) == "-inf"
    assert fmt_p(0.0214843) == "0.0215"


def test_shapley_text(table_8b):
    """Text report with an underlined title and aligned columns."""
    text = render(shapley_document(shapley(table_8b)), "text")
    lines = text.splitlines()
    assert lines[0] == "Exact Shapley values"
    assert lines[1] == "=" * len(lines[0])
    assert any(line.startswith("T") and "0.177" in line for line in lines)


def test_shapley_markdown(table_8b):
    """Markdown report with a pipe table."""
    text = render(shapley_document(shapley(table_8b)), "markdown")
    assert text.startswith("# Exact Shapley values")
    assert "| component | phi | abs share |" in text
    assert "| --- | --- | --- |" in text
    assert "| T | 0.177 |" in text


def test_json_envelope(table_8b):
    """JSON output is versioned and keeps full precision."""
    payload = json.loads(render(shapley_document(shapley(table_8b)), "json"))
    assert payload["schema_version"] == 1
    assert payload["kind"] == "shapley"
    assert payload["result"]["phi"]["T"] == pytest.approx(0.17712, abs=1e-5)


def test_json_is_strict_with_infinite_values(additive_table):
    """Non-finite numbers become null rather than invalid JSON."""
    fit = fit_ols(build_design(additive_table, DesignSpec(universe=additive_table.universe)))
    text = render(fit_document(fit), "json")
    assert "Infinity" not in text
    assert json.loads(text)["result"]["fit"]["aic"] is None
    assert "-inf" in render(fit_document(fit), "text")


def test_unknown_format(table_8b):
    """Only text, markdown and json are rendered."""
    with pytest.raises(InvalidArgument):
        render(shapley_document(shapley(table_8b)), "html")


def test_analysis_documents_render(table_8b):
    """Every analysis document renders in every format."""
    result = audit(table_8b)
    comparison = compare_models(table_8b)
    pairwise = fit_ols(build_design(table_8b, DesignSpec(universe=table_8b.universe, encoding="spin", order="pairwise")))
    documents = [
        spectrum_document(mobius_transform(table_8b)),
        interference_document(interference_pairs(table_8b)),
        audit_document(result, top_violations(result, 20, "T")),
        fit_document(pairwise, coupling_eigen(pairwise)),
        comparison_document(comparison, coupling_eigen(comparison.pairwise)),
        significance_document(mcnemar_exact(1, 9)),
        multiple_document([0.01, 0.04], holm([0.01, 0.04])),
        bayes_factor_document(2.5, 20, 0.707, 3.2),
        selection_document(best_per_k(table_8b)),
        selection_document(greedy_forward(table_8b)),
        selection_document(compare_strategies(table_8b)),
        manifest_document(gen_manifest(["A", "B"])),
    ]
    for document in documents:
        for fmt in ("text", "markdown", "json"):
            assert render(document, fmt)


def test_audit_document(table_8b):
    """The audit summary shows counts and the top-violation context share."""
    result = audit(table_8b)
    document = audit_document(result, top_violations(result, 20, "T"))
    summary = {item.label: item.value for item in document.summary}
    assert summary["violations"] == "181"
    assert summary["triples"] == "325"
    assert summary["top contexts with T"] == "95.0%"
    payload = json.loads(render(document, "json"))
    assert len(payload["result"]["triples"]) == 325
    assert payload["result"]["top"]["min_gap"] == pytest.approx(0.097)


def test_selection_document_rejects_other_results(table_8b):
    """Only selection results have a selection rendering."""
    with pytest.raises(InvalidArgument):
        selection_document(shapley(table_8b))


def test_combine(table_8b):
    """Sections are merged under one title; results are keyed by kind."""
    document = combine("Coalition analysis", [shapley_document(shapley(table_8b)), spectrum_document(mobius_transform(table_8b))])
    assert document.kind == "report"
    assert set(document.result) == {"shapley", "mobius"}
    assert document.tables[0].title == "Exact Shapley values"
    text = render(document, "markdown")
    assert text.startswith("# Coalition analysis")
    assert "## Mass by interaction order" in text
