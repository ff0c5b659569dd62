"""Average-optimal switching policy from the optimal basic LP solution."""

from dataclasses import dataclass
from typing import Optional

from closed_forms.discounted import n_star
from config.defaults import NumericSettings, DEFAULTS
from log_config.logging_config import get_logger
from model.params import ModelParams, validate_params
from model.policy import StationaryPolicy, MNPolicy, FullServicePolicy
from smdp.instance import SmdpInstance, build_smdp, build_zero_n_smdp
from utils.error_utils import SolverError
from .problem import assemble_lp
from .simplex import LpSolution, solve_simplex

logger = get_logger("CapacitySwitch.Average")

CASE_FULL_SERVICE = "full_service"
CASE_ZERO_N = "zero_n"
CASE_MN = "mn"


@dataclass(frozen=True, eq=False)
class AverageSolution:
    """Average-optimal policy and its cost; the cost is the same from every initial state."""

    policy: StationaryPolicy
    v: float
    case: str
    n_star: int
    note: str = ""
    lp: Optional[LpSolution] = None

    @property
    def M(self) -> Optional[int]:
        return self.policy.M if isinstance(self.policy, MNPolicy) else None

    @property
    def N(self) -> Optional[int]:
        return self.policy.N if isinstance(self.policy, MNPolicy) else None


def check_basic_support(sol: LpSolution, s: SmdpInstance, threshold: float) -> None:
    """
    Raise SolverError when some state carries two positive actions.

    An optimal basic solution of a unichain SMDP never does.
    """
    for z in range(s.n_states):
        if sol.x[2 * z] > threshold and sol.x[2 * z + 1] > threshold:
            state = s.state_of(z)
            raise SolverError(f"state {state} has two positive actions "
                              f"({sol.x[2 * z]:.3e}, {sol.x[2 * z + 1]:.3e}); solution is not basic")


def extract_policy(sol: LpSolution, s: SmdpInstance, settings: NumericSettings = DEFAULTS) -> AverageSolution:
    """
    Read the average-optimal policy off the support of an optimal basic solution.

    x((0,1),1) > 0: every full-service policy is optimal.
    x((0,1),0) > 0: a (0,N)-policy.
    otherwise: an (M,N)-policy with M the smallest i >= 1 with x((i,1),0) > 0.
    N is the smallest i in 1..K-1 with x((i,0),1) > 0, or K when there is none.

    Args:
        sol: optimal basic LP solution
        s: the SMDP it solves
        settings: numeric tolerances (support_threshold decides "> 0")

    Returns:
        AverageSolution with v equal to the LP objective
    """
    thr = settings.support_threshold
    check_basic_support(sol, s, thr)
    K = s.levels
    top_n = n_star(s.params)

    def positive(i: int, delta: int, a: int) -> bool:
        return sol.value(i, delta, a) > thr

    if positive(0, 1, 1):
        policy = FullServicePolicy(0)
        logger.info(f"Full-service policies are average-optimal, v={sol.objective:.10g}")
        return AverageSolution(policy=policy, v=sol.objective, case=CASE_FULL_SERVICE, n_star=top_n,
                               note="full-service optimal (any n)", lp=sol)

    switch_on = next((i for i in range(1, K) if positive(i, 0, 1)), K)
    if positive(0, 1, 0):
        M, case = 0, CASE_ZERO_N
    else:
        M = next((i for i in range(1, K) if positive(i, 1, 0)), None)
        if M is None:
            raise SolverError("optimal basic solution has no positive switch-off entry; cannot read M")
        case = CASE_MN
    if switch_on <= M:
        raise SolverError(f"extracted switch-on level N={switch_on} does not exceed M={M}")

    policy = MNPolicy(M, switch_on)
    logger.info(f"Average-optimal policy {policy.label()}, v={sol.objective:.10g}")
    return AverageSolution(policy=policy, v=sol.objective, case=case, n_star=top_n, lp=sol)


def solve_average(p: ModelParams, settings: NumericSettings = DEFAULTS) -> AverageSolution:
    """Build the SMDP, solve its LP and extract the average-optimal policy."""
    validate_params(p)
    instance = build_smdp(p, settings=settings)
    sol = solve_simplex(assemble_lp(instance), settings)
    return extract_policy(sol, instance, settings)


def solve_best_zero_n_lp(p: ModelParams, settings: NumericSettings = DEFAULTS) -> AverageSolution:
    """Best (0,N)-policy through the LP of the SMDP restricted to (0,N)-policies."""
    validate_params(p)
    instance = build_zero_n_smdp(p, settings)
    sol = solve_simplex(assemble_lp(instance), settings)
    result = extract_policy(sol, instance, settings)
    if result.case != CASE_ZERO_N:
        raise SolverError(f"restricted LP returned a {result.case} policy")
    return result
