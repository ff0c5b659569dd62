"""First-passage times and costs of the all-on M/M/inf queue down to a floor level."""

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np
from scipy.linalg import solve_banded

from closed_forms.busy_period import t_between
from config.defaults import NumericSettings, DEFAULTS
from log_config.logging_config import get_logger
from model.params import ModelParams
from utils.error_utils import ValidationError, TruncationError

logger = get_logger("CapacitySwitch.FirstPassage")


@dataclass(frozen=True, eq=False)
class FirstPassageSolution:
    """
    t[k], g[k]: expected time and holding+running cost to reach ``M`` from level M + k,
    all servers on, for k = 0..L-M.
    """

    M: int
    L: int
    t: np.ndarray
    g: np.ndarray

    def time_from(self, i: int) -> float:
        return float(self.t[i - self.M])

    def cost_from(self, i: int) -> float:
        return float(self.g[i - self.M])


def truncation_level(p: ModelParams, start_max: int, settings: NumericSettings = DEFAULTS) -> int:
    """max(start_max, ceil(rho + spread*sqrt(rho+1))) + margin."""
    bulk = math.ceil(p.rho + settings.truncation_spread * math.sqrt(p.rho + 1.0))
    return max(start_max, bulk) + settings.truncation_margin


def _solve_levels(p: ModelParams, M: int, L: int, settings: NumericSettings) -> FirstPassageSolution:
    # unknowns x_{M+1..L}; row for level i: (lambda + i mu) x_i - lambda x_{i+1} - i mu x_{i-1} = rhs_i
    size = L - M
    levels = np.arange(M + 1, L + 1, dtype=float)
    out = p.lam + levels * p.mu
    ab = np.zeros((3, size))
    ab[0, 1:] = -p.lam
    ab[1, :] = out
    ab[2, :-1] = -levels[1:] * p.mu
    rhs = np.empty((size, 2))
    rhs[:, 0] = 1.0
    rhs[:, 1] = p.h * levels + p.c
    # top row: x_L - x_{L-1} = closure; exact busy-period tail for times, reflecting wall for costs
    ab[1, -1] = 1.0
    if size > 1:
        ab[2, -2] = -1.0
    rhs[-1, 0] = t_between(p, L - 1, settings)
    rhs[-1, 1] = (p.h * L + p.c) / (L * p.mu)
    sol = solve_banded((1, 1), ab, rhs)
    t = np.concatenate([[0.0], sol[:, 0]])
    g = np.concatenate([[0.0], sol[:, 1]])
    return FirstPassageSolution(M=M, L=L, t=t, g=g)


def first_passage(p: ModelParams, M: int, start_max: int, L: Optional[int] = None,
                  settings: NumericSettings = DEFAULTS) -> FirstPassageSolution:
    """
    Expected first-passage time and cost from every level in M..start_max down to M.

    Solves the birth-death recursion
    t_i = 1/(lambda + i mu) + lambda/(lambda + i mu) t_{i+1} + i mu/(lambda + i mu) t_{i-1}
    (and its cost analogue with rate h i + c) on levels M..L. The system is then
    solved again with L - start_max doubled, and the answers must agree.

    Args:
        p: model parameters
        M: floor level, at least 0
        start_max: highest starting level of interest, above M
        L: truncation level (defaults to truncation_level)
        settings: numeric tolerances

    Returns:
        FirstPassageSolution on levels M..L

    Raises:
        TruncationError: results at levels <= start_max moved by more than sensitivity_tol
    """
    if M < 0:
        raise ValidationError("M", f"floor level must be >= 0, got {M}")
    if start_max <= M:
        raise ValidationError("start_max", f"must exceed M={M}, got {start_max}")
    L = truncation_level(p, start_max, settings) if L is None else L
    if L <= start_max:
        raise ValidationError("L", f"truncation level {L} must exceed start level {start_max}")

    base = _solve_levels(p, M, L, settings)
    doubled = _solve_levels(p, M, start_max + 2 * (L - start_max), settings)
    span = start_max - M + 1
    worst = 0.0
    for a, b in ((base.t[:span], doubled.t[:span]), (base.g[:span], doubled.g[:span])):
        scale = np.maximum(np.abs(b), 1e-300)
        worst = max(worst, float(np.max(np.abs(a - b) / scale)))
    if worst > settings.sensitivity_tol:
        raise TruncationError(f"first-passage results moved by {worst:.3e} (relative) when L grew from "
                              f"{L} to {doubled.L}; use a larger truncation margin")
    logger.debug(f"First passage to M={M}: L={L}, truncation sensitivity {worst:.2e}")
    return base
