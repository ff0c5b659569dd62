"""Utility functions module."""

from .json_utils import clean_dict_for_json, to_jsonable
from .error_utils import (
    return_error,
    exit_code_for,
    CapacitySwitchError,
    ValidationError,
    SolverError,
    ConvergenceError,
    TruncationError,
    NumericalRangeError,
    EXIT_OK,
    EXIT_VALIDATION,
    EXIT_SOLVER,
)

__all__ = [
    'clean_dict_for_json',
    'to_jsonable',
    'return_error',
    'exit_code_for',
    'CapacitySwitchError',
    'ValidationError',
    'SolverError',
    'ConvergenceError',
    'TruncationError',
    'NumericalRangeError',
    'EXIT_OK',
    'EXIT_VALIDATION',
    'EXIT_SOLVER',
]
