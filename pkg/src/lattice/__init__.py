from .coalition import (
    ComponentSet,
    CoalitionTable,
    parse_component_set,
    label_of,
    popcounts,
)
from .task_matrix import TaskMatrix
from .mobius import (
    OrderMass,
    Dividend,
    HarsanyiSpectrum,
    mobius_transform,
    reconstruct,
    coalition_dividend,
    interaction_order_summary,
)
from .shapley import ShapleyReport, shapley, abs_mass_share
from .interference import (
    MarginalRecord,
    InterferenceSummary,
    PartitionSummary,
    DegradationProfile,
    marginal,
    marginals,
    interference_pairs,
    partition_by_component,
    degradation_profile,
)

__all__ = [
    'ComponentSet',
    'CoalitionTable',
    'parse_component_set',
    'label_of',
    'popcounts',
    'TaskMatrix',
    'OrderMass',
    'Dividend',
    'HarsanyiSpectrum',
    'mobius_transform',
    'reconstruct',
    'coalition_dividend',
    'interaction_order_summary',
    'ShapleyReport',
    'shapley',
    'abs_mass_share',
    'MarginalRecord',
    'InterferenceSummary',
    'PartitionSummary',
    'DegradationProfile',
    'marginal',
    'marginals',
    'interference_pairs',
    'partition_by_component',
    'degradation_profile',
]
