from .render import (
    FORMATS,
    ReportDocument,
    ReportTable,
    SummaryItem,
    fmt_value,
    fmt_p,
    shapley_document,
    spectrum_document,
    interference_document,
    audit_document,
    triple_significance_document,
    fit_document,
    comparison_document,
    significance_document,
    bayes_factor_document,
    multiple_document,
    bootstrap_document,
    selection_document,
    manifest_document,
    combine,
    render,
)

__all__ = [
    'FORMATS',
    'ReportDocument',
    'ReportTable',
    'SummaryItem',
    'fmt_value',
    'fmt_p',
    'shapley_document',
    'spectrum_document',
    'interference_document',
    'audit_document',
    'triple_significance_document',
    'fit_document',
    'comparison_document',
    'significance_document',
    'bayes_factor_document',
    'multiple_document',
    'bootstrap_document',
    'selection_document',
    'manifest_document',
    'combine',
    'render',
]
