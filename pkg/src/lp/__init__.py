"""Average-cost linear program: assembly, simplex solver, policy extraction."""

from .problem import LpProblem, assemble_lp, write_lp_file, var_index
from .simplex import LpSolution, solve_simplex
from .average import (
    AverageSolution,
    extract_policy,
    check_basic_support,
    solve_average,
    solve_best_zero_n_lp,
    CASE_FULL_SERVICE,
    CASE_ZERO_N,
    CASE_MN,
)

__all__ = [
    'LpProblem',
    'assemble_lp',
    'write_lp_file',
    'var_index',
    'LpSolution',
    'solve_simplex',
    'AverageSolution',
    'extract_policy',
    'check_basic_support',
    'solve_average',
    'solve_best_zero_n_lp',
    'CASE_FULL_SERVICE',
    'CASE_ZERO_N',
    'CASE_MN',
]
