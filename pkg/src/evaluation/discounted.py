"""Discount-optimal values and switching thresholds on a truncated state space."""

import csv
import math
from dataclasses import dataclass
from typing import Optional, TextIO, Tuple

import numpy as np
from scipy.linalg import solve, LinAlgError

from closed_forms.discounted import n_alpha, check_alpha
from config.defaults import NumericSettings, DEFAULTS
from log_config.logging_config import get_logger
from model.params import ModelParams
from model.policy import TablePolicy
from utils.error_utils import ValidationError, ConvergenceError, SolverError

logger = get_logger("CapacitySwitch.Discounted")

METHODS = ("policy", "value")
# relative margin an action must win by before policy iteration switches to it
IMPROVEMENT_TOL = 1e-12


@dataclass(frozen=True, eq=False)
class DiscountedSolution:
    """
    Values on levels 0..L (row L is the always-on clamp), indexed V[i, delta].

    Q0[i, delta] and Q1[i, delta] are the one-step lookahead values of actions 0 and 1
    for i < L.
    """

    alpha: float
    V: np.ndarray
    Q0: np.ndarray
    Q1: np.ndarray
    M_star: int
    N_star: int
    n_alpha: int
    L: int
    method: str
    iterations: int
    residual: float

    def action(self, i: int, delta: int) -> int:
        """Greedy action; action 1 from n_alpha upwards, ties keep the current status."""
        if i >= self.n_alpha:
            return 1
        q0, q1 = self.Q0[i, delta], self.Q1[i, delta]
        if q1 < q0:
            return 1
        if q0 < q1:
            return 0
        return delta

    def greedy_policy(self) -> TablePolicy:
        rows = tuple((self.action(i, 0), self.action(i, 1)) for i in range(self.n_alpha))
        return TablePolicy(actions=rows, cutoff_level=self.n_alpha)


def discounted_truncation_level(p: ModelParams, alpha: float, settings: NumericSettings = DEFAULTS) -> int:
    bulk = math.ceil(p.rho + settings.truncation_spread * math.sqrt(p.rho + 1.0))
    return max(n_alpha(p, alpha), bulk) + settings.truncation_margin


class _Bellman:
    """Lookahead operator of the discount-optimality equation on levels 0..L-1."""

    def __init__(self, p: ModelParams, alpha: float, L: int):
        self.p = p
        self.alpha = alpha
        self.L = L
        i = np.arange(L, dtype=float)
        self.i = i
        self.on_rate = alpha + p.lam + i * p.mu
        self.off_rate = alpha + p.lam
        # always-on values at the clamp level L
        top_on = p.h * L / (p.mu + alpha) + p.h * p.lam / (alpha * (p.mu + alpha)) + p.c / alpha
        self.clamp = np.array([p.s1 + top_on, top_on])

    def full_values(self, V: np.ndarray) -> np.ndarray:
        return np.vstack([V, self.clamp])

    def lookahead(self, V: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
        """Q0, Q1 of shape (L, 2) for values V of shape (L, 2)."""
        p = self.p
        W = self.full_values(V)
        up_on = W[1:, 1]
        down_on = np.concatenate([[0.0], W[:-2, 1]])
        on_core = (p.h * self.i + p.c + p.lam * up_on + self.i * p.mu * down_on) / self.on_rate
        off_core = (p.h * self.i + p.lam * W[1:, 0]) / self.off_rate
        Q1 = np.stack([p.s1 + on_core, on_core], axis=1)
        Q0 = np.stack([off_core, p.s0 + off_core], axis=1)
        return Q0, Q1

    def evaluate(self, actions: np.ndarray) -> np.ndarray:
        """Exact values of a stationary policy on 0..L-1 with the clamp above; state index 2i + delta."""
        p, L = self.p, self.L
        n = 2 * L
        A = np.eye(n)
        rhs = np.empty(n)
        for i in range(L):
            for delta in (0, 1):
                row = 2 * i + delta
                if actions[i, delta]:
                    rate = self.on_rate[i]
                    rhs[row] = (1 - delta) * p.s1 + (p.h * i + p.c) / rate
                    up = p.lam / rate
                    if i + 1 < L:
                        A[row, 2 * (i + 1) + 1] -= up
                    else:
                        rhs[row] += up * self.clamp[1]
                    if i > 0:
                        A[row, 2 * (i - 1) + 1] -= i * p.mu / rate
                else:
                    rhs[row] = delta * p.s0 + p.h * i / self.off_rate
                    up = p.lam / self.off_rate
                    if i + 1 < L:
                        A[row, 2 * (i + 1)] -= up
                    else:
                        rhs[row] += up * self.clamp[0]
        try:
            values = solve(A, rhs)
        except LinAlgError as e:
            raise SolverError(f"policy evaluation system is singular: {e}") from e
        return values.reshape(L, 2)


def _policy_iteration(op: _Bellman, settings: NumericSettings) -> Tuple[np.ndarray, int]:
    actions = np.ones((op.L, 2), dtype=np.int8)
    for iteration in range(1, settings.policy_iteration_cap + 1):
        V = op.evaluate(actions)
        Q0, Q1 = op.lookahead(V)
        current = np.where(actions == 1, Q1, Q0)
        other = np.where(actions == 1, Q0, Q1)
        better = other < current - IMPROVEMENT_TOL * np.maximum(1.0, np.abs(current))
        if not better.any():
            return V, iteration
        actions = np.where(better, 1 - actions, actions).astype(np.int8)
    raise ConvergenceError(f"policy iteration did not stabilise in {settings.policy_iteration_cap} rounds")


def _value_iteration(op: _Bellman, tol: float, settings: NumericSettings) -> Tuple[np.ndarray, int]:
    # start from the always-on values, an upper bound, so the iterates decrease
    i = np.arange(op.L, dtype=float)
    p, alpha = op.p, op.alpha
    on = p.h * i / (p.mu + alpha) + p.h * p.lam / (alpha * (p.mu + alpha)) + p.c / alpha
    V = np.stack([p.s1 + on, on], axis=1)
    for iteration in range(1, settings.discounted_max_iterations + 1):
        Q0, Q1 = op.lookahead(V)
        updated = np.minimum(Q0, Q1)
        change = float(np.max(np.abs(updated - V)))
        V = updated
        if change < tol:
            return V, iteration
    raise ConvergenceError(f"value iteration did not reach sup-norm change {tol:.1e} in "
                           f"{settings.discounted_max_iterations} sweeps (last change {change:.3e})")


def solve_discounted(p: ModelParams, alpha: float, tol: Optional[float] = None, method: str = "policy",
                     L: Optional[int] = None, settings: NumericSettings = DEFAULTS) -> DiscountedSolution:
    """
    Solve the discount-optimality equation on levels 0..L-1, clamping V to the always-on
    values from level L upwards.

    V(i,d) = min(V1(i,d), V0(i,d)) with
    V1 = (1-d) s1 + (h i + c)/(alpha+lam+i mu) + lam/(alpha+lam+i mu) V(i+1,1) + i mu/(alpha+lam+i mu) V(i-1,1)
    V0 = d s0 + h i/(alpha+lam) + lam/(alpha+lam) V(i+1,0)

    method="policy" runs policy iteration with exact evaluation and then checks the Bellman
    residual; method="value" iterates the operator until the sup-norm change is below tol.

    Returns:
        DiscountedSolution with M* = max{i : V0(i,1) <= V1(i,1)} (or -1) and
        N* = min{i > M* : V1(i,0) <= V0(i,0)}
    """
    alpha = check_alpha(alpha)
    tol = settings.discounted_tol if tol is None else tol
    if tol <= 0:
        raise ValidationError("tol", f"must be > 0, got {tol}")
    if method not in METHODS:
        raise ValidationError("method", f"expected one of {METHODS}, got {method!r}")
    n_a = n_alpha(p, alpha)
    L = discounted_truncation_level(p, alpha, settings) if L is None else L
    if L <= n_a:
        raise ValidationError("L", f"truncation level {L} must exceed n_alpha={n_a}")

    op = _Bellman(p, alpha, L)
    if method == "policy":
        V, iterations = _policy_iteration(op, settings)
    else:
        V, iterations = _value_iteration(op, tol, settings)
    Q0, Q1 = op.lookahead(V)
    residual = float(np.max(np.abs(np.minimum(Q0, Q1) - V)))
    scale = max(1.0, float(np.max(np.abs(V))))
    if method == "policy" and residual > tol * scale:
        raise ConvergenceError(f"Bellman residual {residual:.3e} after policy iteration exceeds {tol:.1e} x {scale:.3g}")

    off_ok = np.flatnonzero(Q0[:, 1] <= Q1[:, 1])
    M_star = int(off_ok.max()) if off_ok.size else -1
    on_ok = np.flatnonzero(Q1[:, 0] <= Q0[:, 0])
    on_ok = on_ok[on_ok > M_star]
    N_star = int(on_ok.min()) if on_ok.size else L
    logger.info(f"Discounted solution (alpha={alpha:g}, {method} iteration, {iterations} rounds, L={L}): "
                f"M*={M_star}, N*={N_star}, n_alpha={n_a}")
    return DiscountedSolution(alpha=alpha, V=op.full_values(V), Q0=Q0, Q1=Q1, M_star=M_star, N_star=N_star,
                              n_alpha=n_a, L=L, method=method, iterations=iterations, residual=residual)


def dump_values_csv(solution: DiscountedSolution, stream: TextIO) -> int:
    """Write i, V(i,0), V(i,1), the four lookahead values and the greedy actions, one row per level."""
    writer = csv.writer(stream, lineterminator="\n")
    writer.writerow(["i", "V_off", "V_on", "Q0_off", "Q1_off", "Q0_on", "Q1_on", "action_off", "action_on"])
    for i in range(solution.L):
        writer.writerow([i, repr(float(solution.V[i, 0])), repr(float(solution.V[i, 1])),
                         repr(float(solution.Q0[i, 0])), repr(float(solution.Q1[i, 0])),
                         repr(float(solution.Q0[i, 1])), repr(float(solution.Q1[i, 1])),
                         solution.action(i, 0), solution.action(i, 1)])
    return solution.L
