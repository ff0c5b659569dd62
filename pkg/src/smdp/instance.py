"""Finite semi-Markov decision process on the truncated state space."""

import csv
import math
from dataclasses import dataclass, replace
from typing import List, Optional, TextIO, Tuple

import numpy as np

from closed_forms.busy_period import t_between, check_rho
from closed_forms.discounted import n_star
from closed_forms.zero_n import n_tilde
from config.defaults import NumericSettings, DEFAULTS
from log_config.logging_config import get_logger
from model.params import ModelParams
from model.policy import State
from utils.error_utils import ValidationError, SolverError, ConvergenceError, NumericalRangeError

logger = get_logger("CapacitySwitch.Smdp")

ROW_SUM_TOL = 1e-12


def state_index(i: int, delta: int) -> int:
    return 2 * i + delta


@dataclass(frozen=True)
class BoundaryQuantities:
    """
    Aggregated tail above the top level ``top`` = K-1.

    Attributes:
        top: top level of the truncated space
        T_top: expected time from top+1 back down to top, all servers on
        m: m[k] is the expected number of visits to (top+k, 1) between two visits to (top, 1)
        C_loop: expected cost of action 1 at (top, 1) until the next visit to level top
        C_excursion: expected cost from top+1 customers (running) until top customers remain
        excursion_time: sum of m_i/(lambda + i mu), the time counterpart of C_loop
    """

    top: int
    T_top: float
    m: np.ndarray
    C_loop: float
    C_excursion: float
    excursion_time: float


def boundary_quantities(p: ModelParams, tol: Optional[float] = None, levels: Optional[int] = None,
                        settings: NumericSettings = DEFAULTS) -> BoundaryQuantities:
    """
    Visit counts and series costs of the excursions above the top level.

    The visit counts follow the running product
    m_{i+1} = m_i * lambda/(lambda + i mu) * (lambda + (i+1) mu)/((i+1) mu), m_top = 1.
    They grow while i < rho, so the series is cut only past the decay onset
    top + 1 + rho + spread*sqrt(rho+1) and once the current term is below tol times the sum.

    Args:
        p: model parameters
        tol: relative truncation tolerance (defaults to settings.boundary_tol)
        levels: number of levels K of the truncated space (defaults to n*)
        settings: numeric tolerances

    Returns:
        BoundaryQuantities for top = K-1

    Raises:
        ConvergenceError: the series did not settle within settings.series_max_terms terms
    """
    tol = settings.boundary_tol if tol is None else tol
    if tol <= 0:
        raise ValidationError("tol", f"must be > 0, got {tol}")
    K = n_star(p) if levels is None else levels
    if K < 1:
        raise ValidationError("levels", f"must be >= 1, got {K}")
    check_rho(p.rho)

    lam, mu, h, c = p.lam, p.mu, p.h, p.c
    top = K - 1
    onset = top + 1 + p.rho + settings.boundary_onset_spread * math.sqrt(p.rho + 1.0)

    m_values: List[float] = [1.0]
    m_i = 1.0
    i = top
    cost_sum = (h * i + c) / (lam + i * mu)
    above_sum = 0.0
    time_sum = 1.0 / (lam + i * mu)
    while True:
        m_i *= lam / (lam + i * mu) * (lam + (i + 1) * mu) / ((i + 1) * mu)
        i += 1
        if not math.isfinite(m_i):
            raise NumericalRangeError(f"visit counts overflow at level {i} for rho={p.rho}")
        m_values.append(m_i)
        cost_term = m_i * (h * i + c) / (lam + i * mu)
        time_term = m_i / (lam + i * mu)
        cost_sum += cost_term
        above_sum += cost_term
        time_sum += time_term
        if i > onset and cost_term < tol * cost_sum and time_term < tol * time_sum:
            break
        if i - top > settings.series_max_terms:
            raise ConvergenceError(f"boundary series did not settle after {i - top} terms (rho={p.rho})")

    C_excursion = (lam + top * mu) / lam * above_sum
    T_top = t_between(p, top, settings)
    logger.debug(f"Boundary at level {top}: {len(m_values)} terms, C_loop={cost_sum:.10g}, "
                 f"C_excursion={C_excursion:.10g}, T_top={T_top:.10g}")
    m = np.asarray(m_values)
    m.setflags(write=False)
    return BoundaryQuantities(top=top, T_top=T_top, m=m, C_loop=cost_sum,
                              C_excursion=C_excursion, excursion_time=time_sum)


@dataclass(frozen=True, eq=False)
class SmdpInstance:
    """
    SMDP on {0..K-1} x {0,1}; state (i, delta) has index 2i + delta.

    P[z, a, z'] transition probabilities, tau[z, a] expected sojourn times,
    cost[z, a] expected one-step costs, allowed[z, a] action sets.
    """

    params: ModelParams
    levels: int
    P: np.ndarray
    tau: np.ndarray
    cost: np.ndarray
    allowed: np.ndarray
    boundary: BoundaryQuantities

    @property
    def n_states(self) -> int:
        return 2 * self.levels

    def states(self) -> List[State]:
        return [State(i, d) for i in range(self.levels) for d in (0, 1)]

    def state_of(self, idx: int) -> State:
        return State(idx // 2, idx % 2)

    def transitions(self, s: State, a: int) -> List[Tuple[State, float]]:
        """Successor states with positive probability."""
        row = self.P[state_index(s.i, s.delta), a]
        return [(self.state_of(j), float(row[j])) for j in np.flatnonzero(row)]

    def restricted(self, allowed: np.ndarray) -> "SmdpInstance":
        """Copy with a narrower action set; every state keeps at least one action."""
        allowed = _check_allowed(allowed, self.levels) & self.allowed
        if not allowed.any(axis=1).all():
            raise ValidationError("allowed", "restriction leaves a state without actions")
        return replace(self, allowed=_frozen(allowed))

    def check(self) -> None:
        """
        Verify row-stochasticity and positive sojourn times.

        Raises:
            SolverError: a malformed row, which means a construction bug
        """
        sums = self.P.sum(axis=2)
        worst = float(np.max(np.abs(sums - 1.0)))
        if worst > ROW_SUM_TOL:
            raise SolverError(f"SMDP rows are not stochastic (max deviation {worst:.3e})")
        if not np.all(self.tau > 0):
            raise SolverError("SMDP has a non-positive sojourn time")
        if not (np.all(np.isfinite(self.cost)) and np.all(np.isfinite(self.tau))):
            raise SolverError("SMDP has non-finite costs or sojourn times")


def _frozen(array: np.ndarray) -> np.ndarray:
    array.setflags(write=False)
    return array


def _check_allowed(allowed, levels: int) -> np.ndarray:
    mask = np.array(allowed, dtype=bool, copy=True)
    if mask.shape != (2 * levels, 2):
        raise ValidationError("allowed", f"expected shape {(2 * levels, 2)}, got {mask.shape}")
    return mask


def build_smdp(p: ModelParams, levels: Optional[int] = None, allowed: Optional[np.ndarray] = None,
               settings: NumericSettings = DEFAULTS) -> SmdpInstance:
    """
    Build the truncated SMDP.

    Levels below the top carry the original birth-death dynamics. The top level
    K-1 aggregates everything above it, assuming every server runs there; with
    the default K = n* that assumption costs nothing.

    Args:
        p: model parameters
        levels: number of levels K (defaults to n*)
        allowed: optional boolean (2K, 2) action mask
        settings: numeric tolerances

    Returns:
        Immutable SmdpInstance
    """
    K = n_star(p) if levels is None else int(levels)
    if K < 1:
        raise ValidationError("levels", f"must be >= 1, got {K}")
    lam, mu, h, c = p.lam, p.mu, p.h, p.c
    n_states = 2 * K
    P = np.zeros((n_states, 2, n_states))
    tau = np.empty((n_states, 2))
    cost = np.empty((n_states, 2))
    switch_cost = (p.s0, p.s1)

    for i in range(K - 1):
        out = lam + i * mu
        for delta in (0, 1):
            z = state_index(i, delta)
            P[z, 0, state_index(i + 1, 0)] = 1.0
            tau[z, 0] = 1.0 / lam
            P[z, 1, state_index(i + 1, 1)] = lam / out
            if i > 0:
                P[z, 1, state_index(i - 1, 1)] = i * mu / out
            tau[z, 1] = 1.0 / out
            for a in (0, 1):
                cost[z, a] = abs(a - delta) * switch_cost[a] + (h * i + a * c) * tau[z, a]

    bq = boundary_quantities(p, levels=K, settings=settings)
    top = K - 1
    out = lam + top * mu
    wait_and_return = 1.0 / lam + bq.T_top
    off_cost = h * top / lam + p.s1 + bq.C_excursion
    for delta in (0, 1):
        z = state_index(top, delta)
        P[z, 1, state_index(top, 1)] = lam / out
        if top > 0:
            P[z, 1, state_index(top - 1, 1)] = top * mu / out
        tau[z, 1] = lam / out * wait_and_return
        cost[z, 1] = (1 - delta) * p.s1 + bq.C_loop
        P[z, 0, state_index(top, 1)] = 1.0
        tau[z, 0] = wait_and_return
        cost[z, 0] = delta * p.s0 + off_cost

    mask = np.ones((n_states, 2), dtype=bool) if allowed is None else _check_allowed(allowed, K)
    if not mask.any(axis=1).all():
        raise ValidationError("allowed", "every state needs at least one action")

    instance = SmdpInstance(params=p, levels=K, P=_frozen(P), tau=_frozen(tau), cost=_frozen(cost),
                            allowed=_frozen(mask), boundary=bq)
    instance.check()
    logger.info(f"Built SMDP with {K} levels ({n_states} states), boundary series of {len(bq.m)} terms")
    return instance


def zero_n_action_mask(levels: int) -> np.ndarray:
    """Action sets that leave only the (0,N)-policies: off at (0,.), on at (i,1), free at (i,0)."""
    mask = np.zeros((2 * levels, 2), dtype=bool)
    mask[state_index(0, 0), 0] = True
    mask[state_index(0, 1), 0] = True
    for i in range(1, levels):
        mask[state_index(i, 1), 1] = True
        mask[state_index(i, 0), :] = True
    return mask


def build_zero_n_smdp(p: ModelParams, settings: NumericSettings = DEFAULTS) -> SmdpInstance:
    """SMDP on levels 0..N_tilde-1 whose optimal policy is the best (0,N)-policy."""
    K = n_tilde(p)
    return build_smdp(p, levels=K, allowed=zero_n_action_mask(K), settings=settings)


def dump_csv(instance: SmdpInstance, stream: TextIO) -> int:
    """
    Write one row per allowed (state, action, next state) triple.

    Columns: state, action, next_state, prob, tau, cost. Floats use repr precision.

    Returns:
        number of data rows written
    """
    writer = csv.writer(stream, lineterminator="\n")
    writer.writerow(["state", "action", "next_state", "prob", "tau", "cost"])
    rows = 0
    for s in instance.states():
        z = state_index(s.i, s.delta)
        for a in (0, 1):
            if not instance.allowed[z, a]:
                continue
            for nxt, prob in instance.transitions(s, a):
                writer.writerow([str(s), a, str(nxt), repr(prob), repr(float(instance.tau[z, a])),
                                 repr(float(instance.cost[z, a]))])
                rows += 1
    return rows
