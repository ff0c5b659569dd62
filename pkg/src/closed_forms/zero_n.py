"""Average cost of (0,N)-policies and the search for the best one."""

import math
from typing import Optional, Tuple

import numpy as np

from config.defaults import NumericSettings, DEFAULTS
from log_config.logging_config import get_logger
from model.params import ModelParams
from utils.error_utils import ValidationError
from .busy_period import BusyPeriodTable, busy_periods

logger = get_logger("CapacitySwitch.ZeroN")


def _check_n(N: int) -> int:
    if int(N) != N or N < 1:
        raise ValidationError("N", f"switch-on level must be an integer >= 1, got {N!r}")
    return int(N)


def _table_for(p: ModelParams, N: int, table: Optional[BusyPeriodTable], settings: NumericSettings) -> BusyPeriodTable:
    if table is not None and table.L >= N:
        return table
    return busy_periods(p, N, settings)


def zero_n_queue_length(p: ModelParams, N: int, table: Optional[BusyPeriodTable] = None,
                        settings: NumericSettings = DEFAULTS) -> float:
    """Long-run mean number of customers under the (0,N)-policy: rho + (N-1)/2 * N/(N + lambda B_N)."""
    N = _check_n(N)
    B_N = _table_for(p, N, table, settings).B[N]
    return p.rho + (N - 1) / 2.0 * N / (N + p.lam * B_N)


def zero_n_average_cost(p: ModelParams, N: int, table: Optional[BusyPeriodTable] = None,
                        settings: NumericSettings = DEFAULTS) -> float:
    """
    Long-run average cost of the (0,N)-policy.

    A cycle is N arrivals with the system off followed by a busy period from N:
    v = h l_N + (s0 + s1 + c B_N) / (N/lambda + B_N).

    Args:
        p: model parameters
        N: switch-on level, at least 1
        table: precomputed busy periods covering level N (optional)
        settings: numeric tolerances

    Returns:
        average cost per unit time
    """
    N = _check_n(N)
    table = _table_for(p, N, table, settings)
    B_N = table.B[N]
    l_N = zero_n_queue_length(p, N, table, settings)
    return float(p.h * l_N + (p.s0 + p.s1 + p.c * B_N) / (N / p.lam + B_N))


def zero_n_cost_curve(p: ModelParams, N_max: int, settings: NumericSettings = DEFAULTS) -> np.ndarray:
    """Average costs of the (0,N)-policies for N = 1..N_max, as an array indexed N-1."""
    N_max = _check_n(N_max)
    B = busy_periods(p, N_max, settings).B[1:]
    N = np.arange(1, N_max + 1, dtype=float)
    l_N = p.rho + (N - 1.0) / 2.0 * N / (N + p.lam * B)
    return p.h * l_N + (p.s0 + p.s1 + p.c * B) / (N / p.lam + B)


def n_tilde(p: ModelParams) -> int:
    """
    Search bound min{N >= c/h : N(N+1)/(2 lambda) >= (s0+s1)/h}.

    Past this level the (0,N) cost is strictly increasing in N.
    """
    target = 2.0 * p.lam * (p.s0 + p.s1) / p.h
    N = max(1, math.ceil(p.c / p.h))
    # smallest N with N(N+1) >= target, from the root of N^2 + N - target
    root = math.ceil((-1.0 + math.sqrt(1.0 + 4.0 * target)) / 2.0)
    N = max(N, root - 1, 1)
    while N * (N + 1) < target:
        N += 1
    while N > max(1, math.ceil(p.c / p.h)) and (N - 1) * N >= target:
        N -= 1
    return N


def best_zero_n(p: ModelParams, settings: NumericSettings = DEFAULTS) -> Tuple[int, float]:
    """
    Best (0,N)-policy by exhaustive search over N = 1..N_tilde.

    Ties go to the smaller N.

    Returns:
        (N*, v) with v equal to zero_n_average_cost(p, N*)
    """
    upper = n_tilde(p)
    costs = zero_n_cost_curve(p, upper, settings)
    best = int(np.argmin(costs)) + 1
    value = zero_n_average_cost(p, best, settings=settings)
    logger.info(f"Best (0,N)-policy over N=1..{upper}: N*={best}, v={value:.6f}")
    return best, value
