"""
Two-phase revised simplex method with a dense LU-factorised basis.

Pricing is Dantzig's most-negative reduced cost. After ``stall_threshold``
iterations without objective progress the solver switches to Bland's rule
(smallest eligible index for both the entering and the leaving variable),
which cannot cycle, and returns to Dantzig pricing on the next strict improvement.
The leaving row comes from a Harris two-pass ratio test; the basis is refactorised
every iteration and a pivot that leaves the feasible region is undone.
"""

from dataclasses import dataclass, field
from typing import Dict, List, Optional, Set, Tuple

import numpy as np
from scipy.linalg import lu_factor, lu_solve, LinAlgError

from config.defaults import NumericSettings, DEFAULTS
from log_config.logging_config import get_logger
from utils.error_utils import SolverError, ConvergenceError
from .problem import LpProblem

logger = get_logger("CapacitySwitch.Simplex")


@dataclass(frozen=True, eq=False)
class LpSolution:
    """Optimal basic feasible solution."""

    x: np.ndarray
    objective: float
    basis: Tuple[int, ...]
    is_basic: bool
    iterations: int
    phase1_iterations: int
    residual: float
    duals: np.ndarray
    dropped_rows: Tuple[int, ...] = field(default=())

    def value(self, i: int, delta: int, action: int) -> float:
        return float(self.x[2 * (2 * i + delta) + action])

    def support(self, threshold: float) -> Dict[Tuple[int, int, int], float]:
        """Positive entries keyed by (i, delta, action)."""
        out = {}
        for j in np.flatnonzero(self.x > threshold):
            z, a = divmod(int(j), 2)
            out[(z // 2, z % 2, a)] = float(self.x[j])
        return out


class _RevisedSimplex:
    """Working state of one solve: basis, factorisation and pricing mode."""

    def __init__(self, A: np.ndarray, b: np.ndarray, eligible: np.ndarray, settings: NumericSettings):
        self.A = A
        self.b = b
        self.eligible = eligible
        self.settings = settings
        self.basis: List[int] = []
        self.lu = None
        self.iterations = 0

    def factorize(self) -> None:
        B = self.A[:, self.basis]
        try:
            self.lu = lu_factor(B, check_finite=False)
        except (LinAlgError, ValueError) as e:
            raise SolverError(f"basis factorisation failed: {e}") from e
        pivots = np.abs(np.diag(self.lu[0]))
        if pivots.size and float(pivots.min()) <= 1e-14 * max(1.0, float(pivots.max())):
            raise SolverError("basis matrix became singular")

    def primal(self) -> np.ndarray:
        return lu_solve(self.lu, self.b, check_finite=False)

    def ratio_test(self, x_B: np.ndarray, direction: np.ndarray, bland: bool) -> Optional[int]:
        """
        Harris two-pass ratio test.

        Pass 1 bounds the step with every basic variable relaxed by the feasibility
        tolerance; pass 2 picks, among rows whose exact ratio lies under that bound,
        the largest pivot (or the smallest basic index under Bland's rule). Pivots
        below ``pivot_tol`` relative to the largest entry of the direction never qualify.

        Returns:
            leaving row, or None when no row limits the step
        """
        feas = self.settings.feasibility_tol
        scale = float(np.abs(direction).max()) if direction.size else 0.0
        rows = np.flatnonzero(direction > self.settings.pivot_tol * scale)
        if scale == 0.0 or rows.size == 0:
            return None
        d = direction[rows]
        theta_max = max(float(((x_B[rows] + feas) / d).min()), 0.0)
        ratios = x_B[rows] / d
        candidates = np.flatnonzero(ratios <= theta_max)
        if bland:
            floor = max(float(ratios[candidates].min()), 0.0)
            ties = candidates[ratios[candidates] <= floor + feas * max(1.0, floor)]
            return int(rows[min(ties, key=lambda k: self.basis[rows[k]])])
        return int(rows[candidates[np.argmax(d[candidates])]])

    def run(self, cost: np.ndarray, phase: int) -> None:
        """Iterate to optimality for ``cost`` from the current feasible basis."""
        settings = self.settings
        tol = settings.optimality_tol
        stall = 0
        bland = False
        best = np.inf
        banned: Set[int] = set()
        previous: Optional[Tuple[List[int], int]] = None
        while True:
            try:
                self.factorize()
                x_B = self.primal()
                floor = -settings.feasibility_tol * max(1.0, float(np.abs(x_B).max()))
                if previous is not None and float(x_B.min()) < floor:
                    raise SolverError(f"min x_B {x_B.min():.3e} after the last pivot")
            except SolverError as e:
                if previous is None:
                    raise
                # undo the last pivot and price without that column
                self.basis, entering = previous
                previous = None
                banned.add(entering)
                logger.debug(f"Phase {phase}: pivot on column {entering} reverted ({e})")
                continue
            objective = float(cost[self.basis] @ x_B)
            if objective < best - tol * max(1.0, abs(best) if np.isfinite(best) else 1.0):
                best = objective
                stall = 0
                banned.clear()
                if bland:
                    logger.debug(f"Phase {phase}: progress at iteration {self.iterations}, back to Dantzig pricing")
                bland = False
            else:
                stall += 1
                if not bland and stall >= settings.stall_threshold:
                    logger.debug(f"Phase {phase}: {stall} iterations without progress, switching to Bland's rule")
                    bland = True

            y = lu_solve(self.lu, cost[self.basis], trans=1, check_finite=False)
            reduced = cost - y @ self.A
            candidates = self.eligible.copy()
            candidates[self.basis] = False
            candidates[list(banned)] = False
            improving = np.flatnonzero(candidates & (reduced < -tol))
            if improving.size == 0:
                if banned:
                    logger.warning(f"Phase {phase}: stopped with {len(banned)} column(s) excluded after unstable pivots")
                return
            if bland:
                entering = int(improving[0])
            else:
                entering = int(improving[np.argmin(reduced[improving])])

            direction = lu_solve(self.lu, self.A[:, entering], check_finite=False)
            leaving = self.ratio_test(x_B, direction, bland)
            if leaving is None:
                raise SolverError(f"LP is unbounded along column {entering} (phase {phase})")
            previous = (list(self.basis), entering)
            self.basis[leaving] = entering

            self.iterations += 1
            if self.iterations > settings.max_simplex_iterations:
                raise ConvergenceError(f"simplex exceeded {settings.max_simplex_iterations} iterations")


def solve_simplex(lp: LpProblem, settings: NumericSettings = DEFAULTS) -> LpSolution:
    """
    Solve the LP to a vertex optimum.

    Phase 1 starts from an all-artificial basis on the reduced system. Artificial
    variables still basic at zero level afterwards are pivoted out; a row where no
    structural column can replace them is dependent and is dropped.

    Args:
        lp: assembled problem
        settings: numeric tolerances

    Returns:
        LpSolution with a certified residual

    Raises:
        SolverError: infeasible or unbounded LP, residual above tolerance
        ConvergenceError: iteration cap exceeded
    """
    A, b, kept_rows = lp.reduced_system()
    A = np.array(A, dtype=float)
    b = np.array(b, dtype=float)
    negative = b < 0
    A[negative] *= -1.0
    b[negative] *= -1.0
    m, n = A.shape

    # phase 1: structural columns plus one artificial per row
    A1 = np.hstack([A, np.eye(m)])
    eligible = np.concatenate([np.asarray(lp.active, dtype=bool), np.zeros(m, dtype=bool)])
    cost1 = np.concatenate([np.zeros(n), np.ones(m)])
    solver = _RevisedSimplex(A1, b, eligible, settings)
    solver.basis = list(range(n, n + m))
    solver.run(cost1, phase=1)
    phase1_iterations = solver.iterations
    solver.factorize()
    infeasibility = float(cost1[solver.basis] @ solver.primal())
    if infeasibility > settings.feasibility_tol:
        raise SolverError(f"LP is infeasible (phase-1 objective {infeasibility:.3e})")

    # drive artificials out of the basis
    dropped: List[int] = []
    row = 0
    while row < len(solver.basis):
        if solver.basis[row] < n:
            row += 1
            continue
        unit = np.zeros(len(solver.basis))
        unit[row] = 1.0
        solver.factorize()
        pivot_row = lu_solve(solver.lu, unit, trans=1, check_finite=False) @ solver.A
        candidates = np.flatnonzero(eligible & (np.abs(pivot_row) > settings.pivot_tol))
        candidates = np.setdiff1d(candidates, solver.basis)
        if candidates.size:
            solver.basis[row] = int(candidates[np.argmax(np.abs(pivot_row[candidates]))])
            row += 1
            continue
        # the constraints are dependent: drop the artificial together with its own row
        artificial = solver.basis.pop(row)
        constraint = int(np.argmax(np.abs(solver.A[:, artificial])))
        keep = np.ones(solver.A.shape[0], dtype=bool)
        keep[constraint] = False
        dropped.append(int(kept_rows[constraint]))
        kept_rows = kept_rows[keep]
        solver.A = solver.A[keep]
        solver.b = solver.b[keep]
        logger.debug(f"Dropped dependent row {dropped[-1]} after phase 1")

    # phase 2 on structural columns only
    A2 = solver.A[:, :n]
    solver.A = A2
    solver.eligible = np.asarray(lp.active, dtype=bool).copy()
    cost2 = np.asarray(lp.c, dtype=float)
    solver.run(cost2, phase=2)
    solver.factorize()
    x_B = solver.primal()
    y = lu_solve(solver.lu, cost2[solver.basis], trans=1, check_finite=False)

    x = np.zeros(n)
    x[solver.basis] = x_B
    if float(x.min()) < -settings.feasibility_tol:
        raise SolverError(f"final basis is infeasible (min x = {x.min():.3e})")
    x = np.maximum(x, 0.0)
    residual = float(np.max(np.abs(lp.A_eq @ x - lp.b_eq)))
    if residual > settings.feasibility_tol:
        raise SolverError(f"LP residual {residual:.3e} exceeds {settings.feasibility_tol:.1e}")
    objective = float(lp.c @ x)
    logger.info(f"Simplex optimum {objective:.10g} after {solver.iterations} iterations "
                f"({phase1_iterations} in phase 1), residual {residual:.2e}")
    return LpSolution(x=x, objective=objective, basis=tuple(int(j) for j in solver.basis), is_basic=True,
                      iterations=solver.iterations, phase1_iterations=phase1_iterations, residual=residual,
                      duals=y, dropped_rows=tuple(dropped))
