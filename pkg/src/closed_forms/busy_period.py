"""Expected busy periods of the all-on M/M/inf queue."""

import math
from dataclasses import dataclass

import numpy as np

from config.defaults import NumericSettings, DEFAULTS
from log_config.logging_config import get_logger
from model.params import ModelParams
from utils.error_utils import ValidationError, ConvergenceError, NumericalRangeError

logger = get_logger("CapacitySwitch.BusyPeriod")

# e^rho leaves the double range just above 709
MAX_RHO = 700.0


def check_rho(rho: float) -> None:
    if rho > MAX_RHO:
        raise NumericalRangeError(f"rho={rho} is too large: busy periods grow like e^rho and overflow")


def tail_product(rho: float, k: int, settings: NumericSettings = DEFAULTS) -> float:
    """
    r_k = (k!/rho^k) * sum_{j>k} rho^j/j!, summed as sum_{m>=1} rho^m k!/(k+m)!.

    Every term is positive and follows from the previous one by a factor rho/(k+m),
    so there is no cancellation. Summation stops once a term falls below the
    relative tolerance after the factors have dropped below one.

    Raises:
        ConvergenceError: series still growing after ``series_max_terms`` terms
    """
    check_rho(rho)
    term = rho / (k + 1)
    total = term
    m = 1
    while True:
        m += 1
        factor = rho / (k + m)
        term *= factor
        total += term
        if term < settings.series_abs_floor:
            break
        if factor < 1.0 and term < settings.series_rel_tol * total:
            break
        if m > settings.series_max_terms:
            raise ConvergenceError(f"busy-period tail series for k={k}, rho={rho} did not settle in {m} terms")
    return total


def t_between(p: ModelParams, i: int, settings: NumericSettings = DEFAULTS) -> float:
    """
    Expected time T_i to go from i+1 customers down to i with every server on.

    Equals B_{i+1} - B_i and r_i / lambda.
    """
    if i < 0:
        raise ValidationError("i", f"level must be >= 0, got {i}")
    return tail_product(p.rho, i, settings) / p.lam


@dataclass(frozen=True)
class BusyPeriodTable:
    """B[i]: expected time to empty the all-on queue from i customers, for i = 0..L."""

    rho: float
    lam: float
    B: np.ndarray
    L: int

    def T(self, i: int) -> float:
        """B[i+1] - B[i] from the table."""
        return float(self.B[i + 1] - self.B[i])


def busy_periods(p: ModelParams, L: int, settings: NumericSettings = DEFAULTS) -> BusyPeriodTable:
    """
    Busy periods B_0..B_L.

    The products r_k are produced by the backward recurrence
    r_{k-1} = rho (r_k + 1) / k seeded with the direct series at k = L-1;
    the recurrence only shrinks relative errors, and it is independent of the
    forward series behind ``t_between``.

    Args:
        p: model parameters
        L: truncation level, at least 1
        settings: numeric tolerances

    Returns:
        BusyPeriodTable with B[0] = 0
    """
    if L < 1:
        raise ValidationError("L", f"truncation level must be >= 1, got {L}")
    rho = p.rho
    check_rho(rho)

    r = np.empty(L)
    r[L - 1] = tail_product(rho, L - 1, settings)
    for k in range(L - 1, 0, -1):
        r[k - 1] = rho * (r[k] + 1.0) / k
    if not np.all(np.isfinite(r)):
        raise NumericalRangeError(f"busy-period products overflow for rho={rho}")

    B = np.zeros(L + 1)
    B[1:] = np.cumsum(r) / p.lam
    logger.debug(f"Busy periods up to L={L}: B_1={B[1]:.6g}, B_L={B[L]:.6g}")
    return BusyPeriodTable(rho=rho, lam=p.lam, B=B, L=L)


def busy_period_from_series(p: ModelParams, i: int) -> float:
    """
    B_i straight from the closed form (e^rho - 1 + sum_{k=1}^{i-1} (k!/rho^k)(e^rho - sum_{j<=k} rho^j/j!)) / lambda.

    Loses all accuracy once the tail e^rho - partial sum cancels; kept for small rho and i
    as a third, naive path in tests and diagnostics.
    """
    rho = p.rho
    check_rho(rho)
    e_rho = math.exp(rho)
    total = e_rho - 1.0
    partial = 1.0
    power_over_fact = 1.0
    for k in range(1, i):
        power_over_fact *= rho / k
        partial += power_over_fact
        total += (e_rho - partial) / power_over_fact
    return total / p.lam if i >= 1 else 0.0
