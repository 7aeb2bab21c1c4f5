import itertools
import math
import os

import numpy as np
import pytest

from src.datasets import FIXTURE_DIR, format_coalition_csv, load_fixture
from src.lattice import CoalitionTable, mobius_transform, parse_component_set, reconstruct, shapley
from src.regress import DesignSpec, build_design, coupling_eigen, fit_ols, loocv_r2, loocv_r2_refit
from src.selection import best_per_k, greedy_forward
from src.stats import (
    PairedSample,
    bonferroni,
    bootstrap_ci,
    harsanyi_bootstrap,
    holm,
    paired_t,
    wilcoxon_exact,
)
from src.submod import audit


def _names(k):
    return tuple(f"c{i}" for i in range(k))


def _random_table(rng, k):
    return CoalitionTable(_names(k), rng.random(1 << k))


def test_mobius_round_trip():
    """Zeta after Möbius returns the table for random tables up to k = 8."""
    rng = np.random.default_rng(11)
    for _ in range(1000):
        table = _random_table(rng, int(rng.integers(1, 9)))
        rebuilt = reconstruct(mobius_transform(table))
        np.testing.assert_allclose(rebuilt.values, table.values, rtol=0, atol=1e-12)


def test_shapley_efficiency_and_linearity():
    rng = np.random.default_rng(12)
    for _ in range(50):
        k = int(rng.integers(2, 7))
        f, g = _random_table(rng, k), _random_table(rng, k)
        phi_f, phi_g = shapley(f).phi, shapley(g).phi
        assert sum(phi_f.values()) == pytest.approx(f.values[-1] - f.values[0], abs=1e-12)
        combined = shapley(CoalitionTable(f.universe, 2.0 * f.values - 0.5 * g.values)).phi
        for name in f.universe:
            assert combined[name] == pytest.approx(2.0 * phi_f[name] - 0.5 * phi_g[name], abs=1e-12)


def test_shapley_symmetry_and_dummy():
    """Interchangeable components share equally; a dummy gets nothing."""
    rng = np.random.default_rng(13)
    for _ in range(50):
        k = int(rng.integers(3, 7))
        base = rng.random(1 << k)
        masks = np.arange(1 << k)
        swapped = (masks & ~0b11) | ((masks & 1) << 1) | ((masks >> 1) & 1)
        # c0 and c1 enter symmetrically; the last component never changes the value
        values = base + base[swapped]
        last = 1 << (k - 1)
        values = values[masks & ~last]
        phi = shapley(CoalitionTable(_names(k), values)).phi
        assert phi["c0"] == pytest.approx(phi["c1"], abs=1e-12)
        assert phi[f"c{k - 1}"] == pytest.approx(0.0, abs=1e-12)


def test_coverage_functions_are_submodular():
    """Weighted coverage has diminishing returns, so the audit finds nothing."""
    rng = np.random.default_rng(14)
    for _ in range(100):
        k = int(rng.integers(2, 7))
        weights = rng.random(12)
        covers = rng.random((k, 12)) < 0.3
        values = np.empty(1 << k)
        for mask in range(1 << k):
            members = [i for i in range(k) if mask >> i & 1]
            covered = covers[members].any(axis=0) if members else np.zeros(12, dtype=bool)
            values[mask] = weights[covered].sum()
        result = audit(CoalitionTable(_names(k), values))
        assert result.n_violations == 0


def test_loocv_shortcut_on_random_regressions():
    rng = np.random.default_rng(15)
    for trial in range(100):
        k = int(rng.integers(3, 6))
        table = _random_table(rng, k)
        order = "main" if trial % 2 == 0 else "pairwise"
        design = build_design(table, DesignSpec(universe=table.universe, encoding="spin", order=order))
        if design.n <= design.p + 1:
            continue
        assert loocv_r2(design) == pytest.approx(loocv_r2_refit(design), abs=1e-10)


def _enumerated_p(diffs):
    """Share of the 2^n sign patterns whose positive rank sum reaches the observed one."""
    ranks = np.argsort(np.argsort(np.abs(diffs))) + 1
    observed = ranks[diffs > 0].sum()
    hits = sum(
        1
        for signs in itertools.product((False, True), repeat=len(diffs))
        if ranks[list(signs)].sum() >= observed
    )
    return hits / 2 ** len(diffs)


def test_wilcoxon_matches_enumeration():
    rng = np.random.default_rng(16)
    for n in range(1, 13):
        for _ in range(3):
            diffs = rng.normal(0.3, 1.0, size=n)
            result = wilcoxon_exact(PairedSample.from_arrays(diffs, np.zeros(n)))
            assert result.p_one_sided == pytest.approx(_enumerated_p(diffs), abs=1e-12)


def test_bootstrap_independent_of_thread_count(task_matrix_8b):
    sample = np.random.default_rng(17).normal(size=25)
    one = bootstrap_ci(sample, method="bca", resamples=400, seed=3, workers=1)
    eight = bootstrap_ci(sample, method="bca", resamples=400, seed=3, workers=8)
    assert one == eight
    coalition = parse_component_set("T+SR", task_matrix_8b.universe)
    one = harsanyi_bootstrap(task_matrix_8b, coalition, resamples=200, seed=3, workers=1)
    eight = harsanyi_bootstrap(task_matrix_8b, coalition, resamples=200, seed=3, workers=8)
    assert one == eight


def test_percentile_coverage():
    """Nominal 95% intervals for a standard normal mean cover zero 93-97% of the time."""
    rng = np.random.default_rng(18)
    trials = 10_000
    covered = 0
    for trial in range(trials):
        sample = rng.normal(0.0, 1.0, size=100)
        ci = bootstrap_ci(sample, resamples=200, seed=trial, workers=1)
        covered += ci.lo <= 0.0 <= ci.hi
    assert 0.93 <= covered / trials <= 0.97


def test_task_matrix_mean_table_is_column_mean(task_matrix_8b):
    rows = np.array([0, 0, 5, 9])
    table = task_matrix_8b.mean_table(rows)
    np.testing.assert_allclose(table.values, task_matrix_8b.values[rows].mean(axis=0))


def test_constant_contribution_is_its_shapley_value():
    """A component that always adds m gets exactly m."""
    rng = np.random.default_rng(19)
    for _ in range(50):
        k = int(rng.integers(2, 7))
        m = float(rng.normal())
        masks = np.arange(1 << k)
        last = 1 << (k - 1)
        base = rng.random(1 << k)
        values = base[masks & ~last] + m * ((masks & last) != 0)
        phi = shapley(CoalitionTable(_names(k), values)).phi
        assert phi[f"c{k - 1}"] == pytest.approx(m, abs=1e-12)


def test_paired_t_is_antisymmetric():
    """Swapping the two arms negates t and d_z and keeps the two-sided p."""
    rng = np.random.default_rng(20)
    for _ in range(50):
        n = int(rng.integers(3, 30))
        sample = PairedSample.from_arrays(rng.normal(0.2, 1.0, size=n), rng.normal(size=n))
        forward, backward = paired_t(sample), paired_t(sample.swapped())
        assert backward.statistic == pytest.approx(-forward.statistic, abs=1e-12)
        assert backward.effect_size == pytest.approx(-forward.effect_size, abs=1e-12)
        assert backward.p_two_sided == pytest.approx(forward.p_two_sided, abs=1e-12)
        assert backward.p_one_sided == pytest.approx(1.0 - forward.p_one_sided, abs=1e-12)


def test_effect_size_from_t():
    """Any ten differences with t = 2.74 give d_z = 2.74 / sqrt(10)."""
    rng = np.random.default_rng(21)
    for _ in range(20):
        raw = rng.normal(size=10)
        diffs = (raw - raw.mean()) / raw.std(ddof=1) + 2.74 / math.sqrt(10)
        result = paired_t(PairedSample.from_arrays(diffs, np.zeros(10)))
        assert result.statistic == pytest.approx(2.74, abs=1e-9)
        assert result.df == 9
        assert result.effect_size == pytest.approx(0.866, abs=1e-3)


def test_holm_lies_between_bonferroni_and_raw():
    """Holm rejects everything Bonferroni does and nothing the raw threshold keeps."""
    rng = np.random.default_rng(22)
    for _ in range(200):
        p = rng.random(int(rng.integers(1, 30))) ** 3
        strict, stepped = bonferroni(p), holm(p)
        raw = p <= 0.05
        for b, h, r in zip(strict.reject, stepped.reject, raw):
            assert not b or h
            assert not h or r
        assert strict.n_rejected <= stepped.n_rejected <= int(raw.sum())


def test_coupling_eigenvalues_sum_to_zero():
    """The coupling matrix has a zero diagonal, so its trace vanishes."""
    rng = np.random.default_rng(23)
    for _ in range(50):
        k = int(rng.integers(3, 7))
        table = _random_table(rng, k)
        for encoding in ("binary", "spin"):
            fit = fit_ols(build_design(table, DesignSpec(universe=table.universe, encoding=encoding, order="pairwise")))
            spectrum = coupling_eigen(fit)
            assert np.trace(np.array(spectrum.matrix)) == 0.0
            assert sum(spectrum.eigenvalues) == pytest.approx(0.0, abs=1e-10)


def _coverage_table(rng, k):
    weights = rng.random(15)
    covers = rng.random((k, 15)) < 0.35
    values = np.empty(1 << k)
    for mask in range(1 << k):
        members = [i for i in range(k) if mask >> i & 1]
        covered = covers[members].any(axis=0) if members else np.zeros(15, dtype=bool)
        values[mask] = weights[covered].sum()
    return CoalitionTable(_names(k), values)


def test_greedy_on_coverage_is_near_optimal():
    """On monotone submodular tables greedy reaches (1 - 1/e) of the best at every size,
    and never beats the exhaustive optimum."""
    rng = np.random.default_rng(24)
    for _ in range(100):
        k = int(rng.integers(2, 8))
        table = _coverage_table(rng, k)
        best = {optimum.size: optimum.value for optimum in best_per_k(table).optima}
        steps = greedy_forward(table).steps
        for size in range(1, k + 1):
            value = steps[min(size, len(steps) - 1)].value
            assert value >= (1.0 - 1.0 / math.e) * best[size] - 1e-12
        for size, step in enumerate(steps):
            assert step.value <= best[size] + 1e-12


def test_greedy_never_beats_best_per_size():
    rng = np.random.default_rng(25)
    for _ in range(100):
        table = _random_table(rng, int(rng.integers(2, 8)))
        best = {optimum.size: optimum.value for optimum in best_per_k(table).optima}
        for size, step in enumerate(greedy_forward(table).steps):
            assert step.value <= best[size]


def test_fixture_csv_round_trip_is_byte_identical():
    """Formatting a bundled table reproduces its file exactly."""
    for name in ("hotpotqa_8b", "hotpotqa_70b"):
        with open(os.path.join(FIXTURE_DIR, f"{name}.csv")) as f:
            assert format_coalition_csv(load_fixture(name)) == f.read()
