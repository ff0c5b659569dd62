"""Exact long-run average costs of (M,N)- and full-service policies by renewal reward."""

from config.defaults import NumericSettings, DEFAULTS
from log_config.logging_config import get_logger
from model.params import ModelParams
from model.policy import StationaryPolicy, MNPolicy, FullServicePolicy
from utils.error_utils import ValidationError
from .first_passage import first_passage

logger = get_logger("CapacitySwitch.Exact")


def evaluate_mn_exact(p: ModelParams, M: int, N: int, settings: NumericSettings = DEFAULTS) -> float:
    """
    Average cost of the (M,N)-policy.

    A cycle starts when the system is switched off with M customers: N - M arrivals
    while off, switch on, then a first passage from N down to M with every server on.

    v = [sum_{k=M}^{N-1} h k/lambda + s1 + g_N + s0] / [(N - M)/lambda + t_N]
    """
    if M < 0 or N <= M:
        raise ValidationError("policy", f"need 0 <= M < N, got M={M}, N={N}")
    fp = first_passage(p, M, N, settings=settings)
    off_holding = p.h * (M + N - 1) * (N - M) / 2.0 / p.lam
    cycle_cost = off_holding + p.s1 + fp.cost_from(N) + p.s0
    cycle_time = (N - M) / p.lam + fp.time_from(N)
    v = cycle_cost / cycle_time
    logger.debug(f"Exact average cost of (M,N)=({M},{N}): {v:.12g}")
    return v


def evaluate_full_service_exact(p: ModelParams) -> float:
    """h rho + c: the queue settles to Poisson(rho) and the servers run forever."""
    return p.h * p.rho + p.c


def evaluate_policy_exact(p: ModelParams, policy: StationaryPolicy, settings: NumericSettings = DEFAULTS) -> float:
    """
    Exact average cost of an (M,N)- or full-service policy.

    Raises:
        ValidationError: table policies have no closed renewal structure here
    """
    if isinstance(policy, MNPolicy):
        return evaluate_mn_exact(p, policy.M, policy.N, settings)
    if isinstance(policy, FullServicePolicy):
        return evaluate_full_service_exact(p)
    raise ValidationError("policy", f"exact evaluation supports mn and full policies, not {policy.kind}")
