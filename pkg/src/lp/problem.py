"""Occupation-measure LP of the truncated SMDP."""

from dataclasses import dataclass
from typing import Optional, TextIO, Tuple

import numpy as np

from log_config.logging_config import get_logger
from smdp.instance import SmdpInstance
from utils.error_utils import SolverError

logger = get_logger("CapacitySwitch.LpProblem")

# flow rows of a stochastic system sum to the zero functional up to rounding
DEPENDENCY_TOL = 1e-10


def var_index(state_idx: int, action: int) -> int:
    return 2 * state_idx + action


@dataclass(frozen=True, eq=False)
class LpProblem:
    """
    minimize c.x  s.t.  A_eq x = b_eq, x >= 0, x_j = 0 where not ``active[j]``.

    Rows 0..n_flow-1 are the flow-balance rows (one per state), the last row is the
    tau-weighted normalisation. Column 2z + a belongs to x_{z,a}.
    """

    instance: SmdpInstance
    c: np.ndarray
    A_eq: np.ndarray
    b_eq: np.ndarray
    active: np.ndarray
    n_flow: int
    redundant_row: Optional[int]

    @property
    def n_vars(self) -> int:
        return self.A_eq.shape[1]

    @property
    def n_rows(self) -> int:
        return self.A_eq.shape[0]

    def reduced_system(self) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
        """
        Equality system with the dependent flow row removed.

        Returns:
            (A, b, kept_rows)
        """
        kept = np.arange(self.n_rows)
        if self.redundant_row is not None:
            kept = kept[kept != self.redundant_row]
        return self.A_eq[kept], self.b_eq[kept], kept

    def variable_name(self, j: int) -> str:
        z, a = divmod(j, 2)
        return f"x_{z // 2}_{z % 2}_{a}"


def assemble_lp(s: SmdpInstance) -> LpProblem:
    """
    Assemble the average-cost LP of an SMDP.

    Flow row z: sum_a x_{z,a} - sum_{z',a} p(z|z',a) x_{z',a} = 0.
    Normalisation: sum_{z,a} tau(z,a) x_{z,a} = 1.

    The flow rows always sum to zero (every transition row is stochastic), so
    one of them is recorded as ``redundant_row`` and left out of the reduced system.
    """
    n_states = s.n_states
    n_vars = 2 * n_states
    A = np.zeros((n_states + 1, n_vars))
    # column j = 2z' + a holds e_{z'} - P[z', a, :]
    A[:n_states, :] = -s.P.reshape(n_vars, n_states).T
    for z in range(n_states):
        A[z, var_index(z, 0)] += 1.0
        A[z, var_index(z, 1)] += 1.0
    A[n_states, :] = s.tau.reshape(n_vars)
    b = np.zeros(n_states + 1)
    b[n_states] = 1.0
    c = s.cost.reshape(n_vars).copy()
    active = s.allowed.reshape(n_vars).copy()

    if not (np.all(np.isfinite(A)) and np.all(np.isfinite(c))):
        raise SolverError("LP coefficients are not finite")

    column_sums = np.abs(A[:n_states].sum(axis=0))
    redundant = 0 if float(column_sums.max()) <= DEPENDENCY_TOL else None
    if redundant is None:
        logger.warning(f"Flow rows are not dependent (max column sum {column_sums.max():.3e}); keeping all rows")

    for array in (A, b, c, active):
        array.setflags(write=False)
    logger.debug(f"Assembled LP: {n_vars} variables ({int(active.sum())} active), {n_states + 1} rows")
    return LpProblem(instance=s, c=c, A_eq=A, b_eq=b, active=active, n_flow=n_states, redundant_row=redundant)


def _format_terms(coefficients: np.ndarray, problem: LpProblem, per_line: int = 4) -> str:
    terms = []
    for j in np.flatnonzero(coefficients):
        coef = float(coefficients[j])
        sign = "-" if coef < 0 else "+"
        terms.append(f"{sign} {abs(coef)!r} {problem.variable_name(j)}")
    if not terms:
        return "0 x_0_0_0"
    lines = [" ".join(terms[k:k + per_line]) for k in range(0, len(terms), per_line)]
    text = "\n   ".join(lines)
    return text[2:] if text.startswith("+ ") else text


def write_lp_file(problem: LpProblem, stream: TextIO) -> None:
    """
    Write the LP in CPLEX LP text format.

    Inactive variables get a fixed zero bound, so external solvers see the same action sets.
    """
    stream.write("\\ average-cost LP of the truncated switching SMDP\n")
    stream.write("Minimize\n")
    stream.write(f" obj: {_format_terms(problem.c, problem)}\n")
    stream.write("Subject To\n")
    for row in range(problem.n_rows):
        if row < problem.n_flow:
            z = row
            name = f"flow_{z // 2}_{z % 2}"
        else:
            name = "norm"
        rhs = float(problem.b_eq[row])
        stream.write(f" {name}: {_format_terms(problem.A_eq[row], problem)} = {rhs!r}\n")
    stream.write("Bounds\n")
    for j in range(problem.n_vars):
        if not problem.active[j]:
            stream.write(f" {problem.variable_name(j)} = 0\n")
    stream.write("End\n")
