import math

import numpy as np
import pytest
from scipy import integrate
from scipy import stats as sps

from src.exceptions import (
    AllZeroDifferences,
    InvalidArgument,
    NoDiscordantPairs,
    TooFewUnits,
    ZeroVariance,
)
from src.lattice import TaskMatrix
from src.stats import (
    PairedSample,
    bh,
    bonferroni,
    holm,
    jzs_bf10,
    mcnemar_exact,
    one_sample_t,
    paired_t,
    wilcoxon_exact,
)
from src.stats.rng import check_seed, keyed_rng, resample_indices


def _diffs(values):
    return PairedSample.from_arrays(values, [0.0] * len(values))


def test_paired_t():
    """t = mean / (sd / sqrt(n)) on the differences."""
    result = paired_t(_diffs([1.0, 2.0, 3.0, 4.0]))
    assert result.statistic == pytest.approx(3.87298, abs=1e-5)
    assert result.df == 3
    assert result.p_one_sided == pytest.approx(sps.t.sf(3.872983, 3), rel=1e-5)
    assert result.p_two_sided == pytest.approx(2 * result.p_one_sided)
    assert result.effect_size == pytest.approx(result.statistic / 2.0)
    assert result.bf10 is not None and result.bf10 > 1.0


def test_paired_t_from_matrix():
    """Paired samples can be taken from two columns of a task matrix."""
    matrix = TaskMatrix.from_columns(("A", "B"), ["q1", "q2", "q3"], {"A": [0.5, 0.7, 0.9], "Bare": [0.4, 0.5, 0.6]})
    sample = PairedSample.from_matrix(matrix, "A", "Bare")
    assert sample.labels == ["q1", "q2", "q3"]
    np.testing.assert_allclose(sample.differences(), [0.1, 0.2, 0.3])
    assert paired_t(sample, cauchy_scale=None).bf10 is None


def test_t_test_preconditions():
    """Too few units or no spread cannot be tested."""
    with pytest.raises(TooFewUnits):
        one_sample_t([1.0])
    with pytest.raises(ZeroVariance):
        one_sample_t([0.5, 0.5, 0.5])
    with pytest.raises(InvalidArgument):
        PairedSample.from_arrays([1.0, 2.0], [1.0])


def test_wilcoxon_exact():
    """Exact null distribution: 14 of 1024 sign patterns have W- <= 6."""
    result = wilcoxon_exact(_diffs([-1, -2, -3, 4, 5, 6, 7, 8, 9, 10]))
    assert result.n == 10
    assert result.statistic == 6
    assert result.method == "exact"
    assert result.p_one_sided == pytest.approx(14 / 1024)
    assert result.p_two_sided == pytest.approx(28 / 1024)


def test_wilcoxon_alternative_and_zeros():
    """Zero differences are dropped; the "less" tail uses the positive ranks."""
    result = wilcoxon_exact(_diffs([0.0, -1, -2, -3, 4, 5, 6, 7, 8, 9, 10]), alternative="less")
    assert result.n == 10
    assert result.p_one_sided > 0.9
    with pytest.raises(AllZeroDifferences):
        wilcoxon_exact(_diffs([0.0, 0.0]))
    with pytest.raises(InvalidArgument):
        wilcoxon_exact(_diffs([1.0, 2.0]), alternative="two-sided")


def test_wilcoxon_ties_use_midranks():
    """Tied magnitudes share a midrank and keep an exact p value."""
    result = wilcoxon_exact(_diffs([1.0, -1.0, 2.0, 2.0, 3.0]))
    # ranks: 1.5, 1.5, 3.5, 3.5, 5; W- = 1.5
    assert result.statistic == pytest.approx(1.5)
    assert result.method == "exact"
    assert 0.0 < result.p_one_sided < 0.5


def test_wilcoxon_normal_approximation():
    """Above the exact limit the normal approximation is used and flagged."""
    rng = np.random.default_rng(5)
    result = wilcoxon_exact(_diffs(list(rng.normal(0.5, 1.0, size=40))))
    assert result.method == "normal-approximation"
    assert result.notes
    assert 0.0 <= result.p_one_sided <= 1.0


def test_mcnemar_exact():
    """Binomial tail over the discordant pairs."""
    result = mcnemar_exact(1, 9)
    assert result.p_two_sided == pytest.approx(22 / 1024)
    assert result.p_one_sided == pytest.approx(11 / 1024)
    assert mcnemar_exact(0, 8).p_two_sided == pytest.approx(2 / 256)
    assert mcnemar_exact(5, 5).p_two_sided == 1.0
    with pytest.raises(NoDiscordantPairs):
        mcnemar_exact(0, 0)
    with pytest.raises(InvalidArgument):
        mcnemar_exact(-1, 3)


def _bf10_by_effect_size(t, n, r):
    """Marginal likelihood of t under a Cauchy(0, r) effect size over its null likelihood."""
    df = n - 1
    centre = t / math.sqrt(n)

    def integrand(delta):
        return sps.nct.pdf(t, df, delta * math.sqrt(n)) * sps.cauchy.pdf(delta, scale=r)

    value, _ = integrate.quad(integrand, centre - 5.0, centre + 5.0, points=[centre], limit=200)
    return value / sps.t.pdf(t, df)


@pytest.mark.parametrize("t,n", [(2.5, 20), (0.8, 12), (-3.1, 30)])
def test_jzs_matches_effect_size_integral(t, n):
    """The g-mixture quadrature agrees with integrating over the effect size."""
    assert jzs_bf10(t, n, 0.707) == pytest.approx(_bf10_by_effect_size(t, n, 0.707), rel=1e-4)


def test_jzs_shape():
    """BF10 is symmetric in t, grows with |t| and favours the null at t = 0."""
    assert jzs_bf10(2.0, 20) == pytest.approx(jzs_bf10(-2.0, 20))
    assert jzs_bf10(0.0, 20) < 1.0
    assert jzs_bf10(1.0, 20) < jzs_bf10(2.0, 20) < jzs_bf10(4.0, 20)
    # A wider prior penalises a null result more
    assert jzs_bf10(0.0, 20, r=1.0) < jzs_bf10(0.0, 20, r=0.5)


def test_jzs_arguments():
    """n must be at least 2 and the scale positive."""
    with pytest.raises(TooFewUnits):
        jzs_bf10(1.0, 1)
    with pytest.raises(InvalidArgument):
        jzs_bf10(1.0, 10, r=0.0)
    with pytest.raises(InvalidArgument):
        jzs_bf10(float("inf"), 10)


def test_holm():
    """Step-down adjustment with running maximum."""
    result = holm([0.01, 0.04, 0.03, 0.005])
    assert result.adjusted == pytest.approx([0.03, 0.06, 0.06, 0.02])
    assert result.reject == [True, False, False, True]
    assert result.n_rejected == 2


def test_bh():
    """Step-up adjustment with running minimum from the top."""
    result = bh([0.01, 0.04, 0.03, 0.005])
    assert result.adjusted == pytest.approx([0.02, 0.04, 0.04, 0.02])
    assert all(result.reject)


def test_bonferroni():
    """Multiply by the family size and cap at one."""
    result = bonferroni([0.01, 0.04, 0.3])
    assert result.adjusted == pytest.approx([0.03, 0.12, 0.9])
    assert bonferroni([0.5, 0.6]).adjusted == [1.0, 1.0]


def test_multiplicity_arguments():
    """p values outside [0, 1] and bad alpha are refused; empty input is allowed."""
    with pytest.raises(InvalidArgument):
        holm([0.2, 1.5])
    with pytest.raises(InvalidArgument):
        bh([0.2], alpha=1.0)
    assert holm([]).adjusted == []


def test_keyed_streams():
    """The same key always gives the same draws; different keys differ."""
    np.testing.assert_array_equal(resample_indices(42, 3, 10), resample_indices(42, 3, 10))
    assert not np.array_equal(keyed_rng(42, 1).random(5), keyed_rng(42, 2).random(5))
    assert resample_indices(42, 0, 10).max() < 10
    with pytest.raises(InvalidArgument):
        check_seed(-1)


def test_jzs_reported_value():
    """t(9) = 2.74 gives moderate evidence, BF10 close to 3.2."""
    assert jzs_bf10(2.74, 10, 0.707) == pytest.approx(3.2, abs=0.2)
