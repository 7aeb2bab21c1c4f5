from .audit import (
    Triple,
    SubmodularityAudit,
    TopViolations,
    TripleTest,
    TripleSignificance,
    triple_count,
    triple_index,
    enumerate_triples,
    audit,
    top_violations,
    cluster_bootstrap_violation_rate,
    cluster_bootstrap_gamma_median,
    triple_significance,
)

__all__ = [
    'Triple',
    'SubmodularityAudit',
    'TopViolations',
    'TripleTest',
    'TripleSignificance',
    'triple_count',
    'triple_index',
    'enumerate_triples',
    'audit',
    'top_violations',
    'cluster_bootstrap_violation_rate',
    'cluster_bootstrap_gamma_median',
    'triple_significance',
]
