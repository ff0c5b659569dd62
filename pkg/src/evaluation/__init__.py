"""Independent oracles: exact renewal-reward evaluation and the discounted solver."""

from .first_passage import FirstPassageSolution, first_passage, truncation_level
from .exact import evaluate_mn_exact, evaluate_full_service_exact, evaluate_policy_exact
from .discounted import (
    DiscountedSolution,
    solve_discounted,
    dump_values_csv,
    discounted_truncation_level,
)

__all__ = [
    'FirstPassageSolution',
    'first_passage',
    'truncation_level',
    'evaluate_mn_exact',
    'evaluate_full_service_exact',
    'evaluate_policy_exact',
    'DiscountedSolution',
    'solve_discounted',
    'dump_values_csv',
    'discounted_truncation_level',
]
