"""Error types and error-result helpers."""

from typing import Dict, Any, Optional

from .json_utils import clean_dict_for_json

EXIT_OK = 0
EXIT_VALIDATION = 2
EXIT_SOLVER = 3


class CapacitySwitchError(Exception):
    """Base class for every error raised by this package."""


class ValidationError(CapacitySwitchError, ValueError):
    """User input violates a model assumption or a format rule."""

    def __init__(self, field: str, message: str):
        super().__init__(f"{field}: {message}")
        self.field = field
        self.message = message


class SolverError(CapacitySwitchError, RuntimeError):
    """Internal numerical failure (assembly bug, infeasible LP, broken invariant)."""


class ConvergenceError(SolverError):
    """An iteration or series hit its cap before meeting its tolerance."""


class TruncationError(SolverError):
    """A truncated computation moved by more than its tolerance when the truncation level grew."""


class NumericalRangeError(SolverError):
    """An intermediate quantity would leave the floating point range."""


def exit_code_for(exc: BaseException) -> int:
    """
    Map an exception to the CLI exit-code contract.

    Args:
        exc: raised exception

    Returns:
        2 for validation problems, 3 for solver failures and anything unexpected
    """
    if isinstance(exc, ValidationError):
        return EXIT_VALIDATION
    return EXIT_SOLVER


def return_error(error_msg: str, exc: Optional[BaseException] = None, **kwargs) -> Dict[str, Any]:
    """
    Return an error result dictionary.

    Args:
        error_msg: error message
        exc: the exception behind the error, used for the exit code and the field name
        **kwargs: additional fields to include in the error response

    Returns:
        Dictionary with ``success`` False, the message and the exit code
    """
    result = {
        "success": False,
        "error": error_msg,
        "exit_code": exit_code_for(exc) if exc is not None else EXIT_SOLVER,
    }
    if isinstance(exc, ValidationError):
        result["field"] = exc.field
    result.update(kwargs)
    return clean_dict_for_json(result)
