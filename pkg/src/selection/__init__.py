from .strategies import (
    TIE_BREAK_RULE,
    SizeOptimum,
    BestPerSize,
    GreedyStep,
    GreedyPath,
    SelectionReport,
    best_per_k,
    greedy_forward,
    compare_strategies,
)

__all__ = [
    'TIE_BREAK_RULE',
    'SizeOptimum',
    'BestPerSize',
    'GreedyStep',
    'GreedyPath',
    'SelectionReport',
    'best_per_k',
    'greedy_forward',
    'compare_strategies',
]
