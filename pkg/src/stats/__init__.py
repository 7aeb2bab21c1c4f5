from .significance import (
    PairedSample,
    TestResult,
    one_sample_t,
    paired_t,
    wilcoxon_exact,
    mcnemar_exact,
)
from .bayes import jzs_bf10
from .multiplicity import MultipleTestResult, bonferroni, holm, bh
from .bootstrap import BootstrapCI, bootstrap_ci, harsanyi_bootstrap, percentile_interval, bca_interval

__all__ = [
    'PairedSample',
    'TestResult',
    'one_sample_t',
    'paired_t',
    'wilcoxon_exact',
    'mcnemar_exact',
    'jzs_bf10',
    'MultipleTestResult',
    'bonferroni',
    'holm',
    'bh',
    'BootstrapCI',
    'bootstrap_ci',
    'harsanyi_bootstrap',
    'percentile_interval',
    'bca_interval',
]
