import numpy as np
import pytest

from src.exceptions import IncompleteTable
from src.lattice import CoalitionTable, parse_component_set
from src.selection import TIE_BREAK_RULE, best_per_k, compare_strategies, greedy_forward


def test_best_per_k_8b(table_8b):
    """On 8B the best coalition is T alone."""
    result = best_per_k(table_8b)
    assert [o.size for o in result.optima] == [0, 1, 2, 3, 4, 5]
    assert result.optima[0].coalition == "Bare"
    assert result.k_star == 1
    assert result.best.coalition == "T"
    assert result.best.value == pytest.approx(0.284)
    assert result.tie_break == TIE_BREAK_RULE


def test_best_per_k_ties_prefer_smaller(table_70b):
    """T+R and T+SR+R tie on 70B; the smaller coalition wins."""
    result = best_per_k(table_70b)
    assert result.k_star == 2
    assert result.best.coalition == "T+R"
    assert result.best.value == pytest.approx(0.441)
    assert result.optima[3].coalition == "T+SR+R"
    assert result.optima[3].value == pytest.approx(0.441)


def test_ties_within_a_size_go_to_lower_mask():
    """Equal values of one size resolve to canonical mask order."""
    table = CoalitionTable(("A", "B", "C"), [0.0, 0.5, 0.5, 0.2, 0.5, 0.1, 0.1, 0.0])
    result = best_per_k(table)
    assert result.optima[1].coalition == "A"
    assert result.best.coalition == "A"


def test_greedy_8b(table_8b):
    """Greedy adds T and then finds no positive marginal."""
    path = greedy_forward(table_8b)
    assert path.start == "Bare"
    assert [s.added for s in path.steps] == ["T", None]
    assert path.final == "T"
    assert path.final_value == pytest.approx(0.284)
    assert path.steps[0].marginals["T"] == pytest.approx(0.237)
    assert all(gain <= 0 for gain in path.steps[1].marginals.values())


def test_greedy_70b(table_70b):
    """Greedy stops at T+R because adding SR gains exactly nothing."""
    path = greedy_forward(table_70b)
    assert [s.added for s in path.steps] == ["T", "R", None]
    assert path.steps[0].marginals["T"] == pytest.approx(0.268)
    assert path.steps[1].marginals["R"] == pytest.approx(0.072)
    assert path.steps[2].marginals["SR"] == pytest.approx(0.0, abs=1e-12)
    assert path.final == "T+R"
    assert path.final_mask == 2 | 16


def test_greedy_from_start(table_8b):
    """A start coalition is kept and extended."""
    start = parse_component_set("P+M", table_8b.universe)
    path = greedy_forward(table_8b, start)
    assert path.start == "P+M"
    assert path.final_mask & start.mask == start.mask


def test_greedy_equal_marginals_take_earlier_component():
    """With two equal best marginals the earlier component is added."""
    table = CoalitionTable(("A", "B"), [0.0, 1.0, 1.0, 1.5])
    path = greedy_forward(table)
    assert [s.added for s in path.steps] == ["A", "B", None]


def test_compare_strategies(table_8b, table_70b):
    """Greedy reaches the exhaustive optimum on both tables."""
    report = compare_strategies(table_8b)
    assert report.greedy_final == report.best.coalition == "T"
    assert report.optimality_gap == 0.0
    assert report.improvement_pct == 0.0
    assert report.full_value == pytest.approx(0.21)
    assert report.best_vs_full_gap == pytest.approx((0.284 - 0.21) / 0.21)
    report = compare_strategies(table_70b)
    assert report.greedy_value == pytest.approx(report.best.value)
    assert report.optimality_gap == pytest.approx(0.0, abs=1e-12)


def test_compare_strategies_greedy_gap():
    """Complementary components defeat greedy selection."""
    # A and B are worthless alone but strong together; C is a modest single
    table = CoalitionTable(("A", "B", "C"), [0.0, -0.1, -0.1, 1.0, 0.3, 0.2, 0.2, 0.9])
    report = compare_strategies(table)
    assert report.greedy_final == "C"
    assert report.best.coalition == "A+B"
    assert report.optimality_gap == pytest.approx(0.7)
    assert report.improvement_pct == pytest.approx(0.7 / 0.3 * 100)


def test_selection_needs_complete_table():
    """Exhaustive search needs every coalition."""
    table = CoalitionTable(("A", "B"), np.array([0.0, 1.0, 2.0, np.nan]), np.array([True, True, True, False]))
    with pytest.raises(IncompleteTable):
        best_per_k(table)
    with pytest.raises(IncompleteTable):
        greedy_forward(table)
