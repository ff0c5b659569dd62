"""
Discrete-event simulation of the switched M/M/inf queue.

Each replication r draws from numpy's counter-based Philox generator keyed by
``seed + r``. Exponential sojourns come from the inverse transform -log(1-U)/rate.
While the system is on with i customers the next event occurs at rate lambda + i mu;
while it is off only arrivals happen, at rate lambda.
"""

import math
from dataclasses import dataclass, field, asdict
from typing import Any, Dict, List, Optional, Tuple

import numpy as np
from scipy.stats import t as student_t

from log_config.logging_config import get_logger
from model.params import ModelParams
from model.policy import StationaryPolicy, MNPolicy
from utils.error_utils import ValidationError

logger = get_logger("CapacitySwitch.Sim")

MIN_CYCLES = 10
UNITS = ("cycles", "time")
# uniforms drawn per refill in the scalar trajectory loop
_BLOCK = 8192


@dataclass(frozen=True)
class SimConfig:
    """
    Simulation horizon and seeding.

    ``unit`` is "cycles" (regenerative estimator, (M,N)-policies only) or "time";
    None picks cycles for (M,N)-policies and time otherwise. ``warmup`` is counted
    in the same unit as ``horizon``.
    """

    seed: int = 0
    horizon: float = 10_000.0
    warmup: float = 0.0
    replications: int = 1
    unit: Optional[str] = None
    confidence: float = 0.95

    def __post_init__(self):
        if self.replications < 1:
            raise ValidationError("replications", f"must be >= 1, got {self.replications}")
        if self.warmup < 0:
            raise ValidationError("warmup", f"must be >= 0, got {self.warmup}")
        if not self.horizon > self.warmup:
            raise ValidationError("horizon", f"must exceed warmup={self.warmup}, got {self.horizon}")
        if self.unit is not None and self.unit not in UNITS:
            raise ValidationError("unit", f"expected one of {UNITS}, got {self.unit!r}")
        if not 0.0 < self.confidence < 1.0:
            raise ValidationError("confidence", f"must lie in (0, 1), got {self.confidence}")
        if int(self.seed) != self.seed or self.seed < 0:
            raise ValidationError("seed", f"must be a non-negative integer, got {self.seed!r}")


@dataclass(frozen=True)
class SimReport:
    """Estimated average cost rate with its confidence half-width and cost breakdown."""

    mean: float
    half_width: float
    holding: float
    running: float
    switching: float
    cycles: int
    seed: int
    replications: int
    mode: str
    policy: str
    warnings: Tuple[str, ...] = field(default=())

    def to_row(self) -> Dict[str, Any]:
        row = asdict(self)
        row["warnings"] = "; ".join(self.warnings)
        return row


def _generator(seed: int, replication: int) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(int(seed) + replication))


def _exponential(u: np.ndarray, rate):
    return -np.log1p(-u) / rate


def _half_width(samples: np.ndarray, confidence: float) -> float:
    n = samples.size
    if n < 2:
        return float("nan")
    return float(student_t.ppf(0.5 + confidence / 2.0, n - 1) * np.std(samples, ddof=1) / math.sqrt(n))


def _simulate_cycles(p: ModelParams, policy: StationaryPolicy, lanes: int,
                     rng: np.random.Generator) -> Tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
    """
    Simulate ``lanes`` independent regeneration cycles side by side.

    Every lane starts in the regeneration state, before its decision, and stops on
    its first return there.

    Returns:
        per-cycle (length, holding cost, running cost, switching cost)
    """
    start = policy.regeneration_state()
    levels = max(policy.cutoff, start.i) + 1
    table = policy.action_table(levels)
    lam, mu = p.lam, p.mu
    switch_cost = np.array([p.s0, p.s1])

    i = np.full(lanes, start.i, dtype=np.int64)
    delta = np.full(lanes, start.delta, dtype=np.int8)
    length = np.zeros(lanes)
    holding = np.zeros(lanes)
    running = np.zeros(lanes)
    switching = np.zeros(lanes)
    active = np.arange(lanes)

    while active.size:
        ii = i[active]
        dd = delta[active]
        a = np.where(ii < levels, table[np.minimum(ii, levels - 1), dd], 1)
        switched = a != dd
        switching[active] += np.where(switched, switch_cost[a], 0.0)
        rate = lam + a * ii * mu
        u = rng.random((2, active.size))
        dt = _exponential(u[0], rate)
        length[active] += dt
        holding[active] += p.h * ii * dt
        running[active] += p.c * a * dt
        arrival = u[1] * rate < lam
        ii = ii + np.where(arrival, 1, -1)
        i[active] = ii
        delta[active] = a
        done = (ii == start.i) & (a == start.delta)
        active = active[~done]
    return length, holding, running, switching


def _simulate_regenerative(p: ModelParams, policy: MNPolicy, cfg: SimConfig) -> SimReport:
    per_rep = int(math.ceil(cfg.horizon))
    skip = int(math.floor(cfg.warmup))
    parts = []
    for rep in range(cfg.replications):
        rng = _generator(cfg.seed, rep)
        cycles = _simulate_cycles(p, policy, per_rep, rng)
        parts.append(np.stack(cycles)[:, skip:])
    length, holding, running, switching = np.concatenate(parts, axis=1)
    n = length.size
    total_time = float(length.sum())
    h_rate = float(holding.sum()) / total_time
    r_rate = float(running.sum()) / total_time
    s_rate = float(switching.sum()) / total_time
    mean = h_rate + r_rate + s_rate
    # regenerative central limit theorem on Z_k = Y_k - v T_k
    z = holding + running + switching - mean * length
    if n >= 2:
        q = student_t.ppf(0.5 + cfg.confidence / 2.0, n - 1)
        half_width = float(q * np.std(z, ddof=1) / (np.mean(length) * math.sqrt(n)))
    else:
        half_width = float("nan")
    warnings = []
    if n < MIN_CYCLES:
        warnings.append(f"only {n} regeneration cycles observed (< {MIN_CYCLES})")
    return SimReport(mean=mean, half_width=half_width, holding=h_rate, running=r_rate, switching=s_rate,
                     cycles=n, seed=int(cfg.seed), replications=cfg.replications, mode="regenerative",
                     policy=policy.label(), warnings=tuple(warnings))


def _trajectory(p: ModelParams, policy: StationaryPolicy, horizon: float, warmup: float,
                rng: np.random.Generator) -> Tuple[float, float, float, int]:
    """One time-horizon run; returns (holding, running, switching, cycles) accumulated after warmup."""
    start = policy.regeneration_state()
    i, delta = start.i, start.delta
    now = 0.0
    holding = running = switching = 0.0
    cycles = 0
    buffer = rng.random(_BLOCK)
    pos = 0
    while now < horizon:
        if pos + 2 > _BLOCK:
            buffer = rng.random(_BLOCK)
            pos = 0
        a = policy.decide(i, delta)
        if a != delta and now >= warmup:
            switching += p.s1 if a else p.s0
        rate = p.lam + a * i * p.mu
        dt = -math.log1p(-buffer[pos]) / rate
        end = min(now + dt, horizon)
        counted = max(0.0, end - max(now, warmup))
        holding += p.h * i * counted
        running += p.c * a * counted
        now += dt
        if buffer[pos + 1] * rate < p.lam:
            i += 1
        else:
            i -= 1
        pos += 2
        delta = a
        if now < horizon and now >= warmup and i == start.i and delta == start.delta:
            cycles += 1
    return holding, running, switching, cycles


def _simulate_time_average(p: ModelParams, policy: StationaryPolicy, cfg: SimConfig) -> SimReport:
    span = cfg.horizon - cfg.warmup
    rates: List[Tuple[float, float, float]] = []
    cycles = 0
    for rep in range(cfg.replications):
        rng = _generator(cfg.seed, rep)
        holding, running, switching, reps_cycles = _trajectory(p, policy, cfg.horizon, cfg.warmup, rng)
        rates.append((holding / span, running / span, switching / span))
        cycles += reps_cycles
    per_rep = np.asarray(rates)
    h_rate, r_rate, s_rate = (float(x) for x in per_rep.mean(axis=0))
    mean = h_rate + r_rate + s_rate
    half_width = _half_width(per_rep.sum(axis=1), cfg.confidence)
    warnings = []
    if cfg.replications < 2:
        warnings.append("single replication: no confidence interval")
    if cycles < MIN_CYCLES:
        warnings.append(f"only {cycles} regeneration cycles observed (< {MIN_CYCLES})")
    return SimReport(mean=mean, half_width=half_width, holding=h_rate, running=r_rate, switching=s_rate,
                     cycles=cycles, seed=int(cfg.seed), replications=cfg.replications, mode="time_average",
                     policy=policy.label(), warnings=tuple(warnings))


def simulate_policy(p: ModelParams, pol: StationaryPolicy, cfg: SimConfig) -> SimReport:
    """
    Estimate the long-run average cost of a stationary policy.

    (M,N)-policies use the regenerative estimator over cycles between visits to (N,0);
    other policies use time averages over ``replications`` runs with the interval
    taken across runs.

    Args:
        p: model parameters
        pol: the policy; it must be all-on above its cutoff
        cfg: horizon, warm-up, seed and replications

    Returns:
        SimReport
    """
    unit = cfg.unit or ("cycles" if isinstance(pol, MNPolicy) else "time")
    if unit == "cycles":
        if not isinstance(pol, MNPolicy):
            raise ValidationError("unit", "cycle horizons need an (M,N)-policy")
        report = _simulate_regenerative(p, pol, cfg)
    else:
        report = _simulate_time_average(p, pol, cfg)
    for message in report.warnings:
        logger.warning(f"Simulation of {report.policy}: {message}")
    logger.info(f"Simulated {report.policy}: {report.mean:.6f} +/- {report.half_width:.6f} "
                f"({report.mode}, {report.cycles} cycles, seed {report.seed})")
    return report


def simulate_busy_period(p: ModelParams, i0: int, reps: int, seed: int = 0,
                         confidence: float = 0.95) -> Tuple[float, float]:
    """
    Mean time for the all-on queue to empty from i0 customers.

    Returns:
        (mean, confidence half-width) over ``reps`` independent busy periods
    """
    if i0 < 1:
        raise ValidationError("i0", f"starting level must be >= 1, got {i0}")
    if reps < 1:
        raise ValidationError("reps", f"must be >= 1, got {reps}")
    rng = _generator(seed, 0)
    i = np.full(reps, i0, dtype=np.int64)
    elapsed = np.zeros(reps)
    active = np.arange(reps)
    while active.size:
        ii = i[active]
        rate = p.lam + ii * p.mu
        u = rng.random((2, active.size))
        elapsed[active] += _exponential(u[0], rate)
        ii = ii + np.where(u[1] * rate < p.lam, 1, -1)
        i[active] = ii
        active = active[ii > 0]
    mean = float(elapsed.mean())
    return mean, _half_width(elapsed, confidence)
