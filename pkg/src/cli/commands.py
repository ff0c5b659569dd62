"""
Command functions shared by the CLI and the MCP server.

Every command takes a RunConfig and returns a result dictionary
``{"success", "exit_code", "command", "columns", "rows", "warnings"}``; failures come
back through ``return_error`` with the exit code of the exception.
"""

import functools
import itertools
import multiprocessing
import time
from typing import Any, Callable, Dict, List, Mapping, Optional, Sequence, Tuple

from closed_forms.discounted import keep_on_level, switch_off_bound, alpha_star, n_star
from closed_forms.zero_n import best_zero_n, n_tilde
from config.defaults import NumericSettings
from evaluation.discounted import solve_discounted
from evaluation.exact import evaluate_mn_exact, evaluate_policy_exact, evaluate_full_service_exact
from log_config.logging_config import get_logger
from lp.average import solve_average, solve_best_zero_n_lp, CASE_FULL_SERVICE
from model.params import ModelParams, REFERENCE_INSTANCE, PARAM_KEYS
from model.policy import MNPolicy, parse_policy
from sim.simulator import SimConfig, simulate_policy
from utils.error_utils import CapacitySwitchError, ValidationError, return_error, EXIT_OK, EXIT_SOLVER
from utils.json_utils import clean_dict_for_json
from .run_config import RunConfig, build_run_config

logger = get_logger("CapacitySwitch.Commands")

# acceptance targets for the reference instance (lambda=2, mu=1, h=1, c=100, s0=s1=100)
EXAMPLE_M = 4
EXAMPLE_N = (38, 39)
# long-run cost of (4,38); exact evaluation, simulation and an independent LP solve agree
EXAMPLE_V = 43.172606
EXAMPLE_V_TOL = 1e-4
# figure commonly quoted for the instance, about 0.22 above the computed optimum
QUOTED_V = 43.39
EXAMPLE_BEST_N = 47
EXAMPLE_BEST_V_RANGE = (50.93, 51.13)
EXAMPLE_MIN_GAP = 7.0
EXACT_REL_TOL = 1e-6
EXAMPLE_ALPHA = 1e-4

SOLVE_COLUMNS = ["M", "N", "v", "case", "n_star", "v_exact", "exact_rel_gap", "N_exact", "v_exact_best",
                 "lp_iterations", "phase1_iterations", "lp_residual", "note"]
BEST0N_COLUMNS = ["N_star", "v", "n_tilde"]
BEST0N_LP_COLUMNS = BEST0N_COLUMNS + ["N_lp", "v_lp"]
EVALUATE_COLUMNS = ["policy", "v"]
SIMULATE_COLUMNS = ["policy", "mean", "half_width", "holding", "running", "switching", "cycles", "seed",
                    "replications", "mode", "warnings"]
SWEEP_RESULT_COLUMNS = ["M", "N", "case", "v", "N_best0N", "v_best0N", "gap"]
DISCOUNTED_COLUMNS = ["alpha", "method", "M_star", "N_star", "n_alpha", "L", "iterations", "residual",
                      "keep_on_level", "switch_off_bound", "n_star", "alpha_star"]
VALUES_COLUMNS = ["i", "V_off", "V_on", "Q0_off", "Q1_off", "Q0_on", "Q1_on", "action_off", "action_on"]
REPRODUCE_COLUMNS = ["check", "expected", "observed", "status"]


def _result(command: str, columns: Sequence[str], rows: List[Dict[str, Any]],
            warnings: Sequence[str] = (), exit_code: int = EXIT_OK, **extra) -> Dict[str, Any]:
    result = {
        "success": exit_code == EXIT_OK,
        "exit_code": exit_code,
        "command": command,
        "columns": list(columns),
        "rows": rows,
        "warnings": list(warnings),
    }
    result.update(extra)
    return clean_dict_for_json(result)


def command(name: str) -> Callable[[Callable[[RunConfig], Dict[str, Any]]], Callable[[RunConfig], Dict[str, Any]]]:
    """Turn package exceptions raised by a command into error results."""
    def wrap(func):
        @functools.wraps(func)
        def run(cfg: RunConfig) -> Dict[str, Any]:
            logger.info(f"Running {name}")
            started = time.perf_counter()
            try:
                result = func(cfg)
            except CapacitySwitchError as e:
                logger.error(f"{name} failed: {e}")
                return return_error(str(e), e, command=name)
            except Exception as e:
                logger.exception(f"{name} failed unexpectedly")
                return return_error(f"unexpected failure: {e}", e, command=name)
            logger.info(f"{name} finished in {time.perf_counter() - started:.3f}s with exit code {result['exit_code']}")
            return result
        return run
    return wrap


def _exact_neighbourhood(p: ModelParams, M: int, N: int, settings: NumericSettings) -> Tuple[int, float, float]:
    """Exact cost of (M,N) and the best switch-on level among N-1, N, N+1."""
    values = {n: evaluate_mn_exact(p, M, n, settings) for n in (N - 1, N, N + 1) if n > M}
    best = min(values, key=lambda n: (values[n], n))
    return best, values[best], values[N]


@command("solve")
def cmd_solve(cfg: RunConfig) -> Dict[str, Any]:
    """Average-optimal policy from the LP, cross-checked with the exact evaluator."""
    p = cfg.params
    sol = solve_average(p, cfg.settings)
    row = {
        "M": sol.M,
        "N": sol.N,
        "v": sol.v,
        "case": sol.case,
        "n_star": sol.n_star,
        "lp_iterations": sol.lp.iterations,
        "phase1_iterations": sol.lp.phase1_iterations,
        "lp_residual": sol.lp.residual,
        "note": sol.note,
    }
    if sol.case == CASE_FULL_SERVICE:
        v_exact = evaluate_full_service_exact(p)
        row.update(v_exact=v_exact, N_exact=None, v_exact_best=v_exact)
    else:
        N_exact, v_best, v_exact = _exact_neighbourhood(p, sol.M, sol.N, cfg.settings)
        row.update(v_exact=v_exact, N_exact=N_exact, v_exact_best=v_best)
    row["exact_rel_gap"] = abs(sol.v - row["v_exact"]) / abs(row["v_exact"])
    warnings = []
    if row["exact_rel_gap"] > EXACT_REL_TOL:
        message = f"LP objective {sol.v!r} and exact value {row['v_exact']!r} differ by {row['exact_rel_gap']:.2e}"
        logger.warning(message)
        warnings.append(message)
    return _result("solve", SOLVE_COLUMNS, [row], warnings, params=p.to_dict())


@command("best0n")
def cmd_best0n(cfg: RunConfig) -> Dict[str, Any]:
    """Best (0,N)-policy from the closed form; ``lp`` also solves the restricted LP."""
    p = cfg.params
    N_best, v = best_zero_n(p, cfg.settings)
    row = {"N_star": N_best, "v": v, "n_tilde": n_tilde(p)}
    columns = BEST0N_COLUMNS
    if cfg.option("lp", False):
        lp_sol = solve_best_zero_n_lp(p, cfg.settings)
        row.update(N_lp=lp_sol.N, v_lp=lp_sol.v)
        columns = BEST0N_LP_COLUMNS
    return _result("best0n", columns, [row], params=p.to_dict())


@command("evaluate")
def cmd_evaluate(cfg: RunConfig) -> Dict[str, Any]:
    """Exact average cost of an (M,N)- or full-service policy."""
    policy = parse_policy(cfg.require("policy"))
    v = evaluate_policy_exact(cfg.params, policy, cfg.settings)
    return _result("evaluate", EVALUATE_COLUMNS, [{"policy": policy.label(), "v": v}],
                   params=cfg.params.to_dict())


def sim_config_from(cfg: RunConfig) -> SimConfig:
    return SimConfig(seed=cfg.option("seed", 0),
                     horizon=cfg.option("horizon", SimConfig.horizon),
                     warmup=cfg.option("warmup", 0.0),
                     replications=cfg.option("replications", 1),
                     unit=cfg.option("unit"))


@command("simulate")
def cmd_simulate(cfg: RunConfig) -> Dict[str, Any]:
    """Monte Carlo estimate of a policy's average cost; the seed is echoed in the row."""
    policy = parse_policy(cfg.require("policy"))
    report = simulate_policy(cfg.params, policy, sim_config_from(cfg))
    return _result("simulate", SIMULATE_COLUMNS, [report.to_row()], report.warnings,
                   params=cfg.params.to_dict())


def sweep_points(cfg: RunConfig) -> List[Dict[str, float]]:
    """Cartesian product of the grid axes in the given order, the last axis varying fastest."""
    if not cfg.grid:
        raise ValidationError("grid", "sweep needs at least one --grid axis")
    keys = [key for key, _ in cfg.grid]
    points = []
    for combo in itertools.product(*(values for _, values in cfg.grid)):
        point = dict(cfg.base)
        point.update(zip(keys, combo))
        # fails fast on an invalid grid point before any solving starts
        ModelParams.from_mapping(point)
        points.append({key: point[key] for key in PARAM_KEYS})
    return points


def sweep_point(task: Tuple[Dict[str, float], Dict[str, Any]]) -> Dict[str, Any]:
    """Solve one grid point; module level so a process pool can pickle it."""
    point, settings_doc = task
    p = ModelParams.from_mapping(point)
    settings = NumericSettings.from_mapping(settings_doc)
    sol = solve_average(p, settings)
    N_best, v_best = best_zero_n(p, settings)
    return {**point, "M": sol.M, "N": sol.N, "case": sol.case, "v": sol.v,
            "N_best0N": N_best, "v_best0N": v_best, "gap": v_best - sol.v}


@command("sweep")
def cmd_sweep(cfg: RunConfig) -> Dict[str, Any]:
    """
    Tabulate the LP optimum against the best (0,N)-policy over a parameter grid.

    Rows come out in grid order whatever the number of workers.
    """
    points = sweep_points(cfg)
    tasks = [(point, cfg.settings.to_dict()) for point in points]
    workers = cfg.option("workers", 1)
    if workers < 1:
        raise ValidationError("workers", f"must be >= 1, got {workers}")
    logger.info(f"Sweeping {len(tasks)} grid points with {workers} worker(s)")
    if workers == 1 or len(tasks) == 1:
        rows = [sweep_point(task) for task in tasks]
    else:
        with multiprocessing.get_context("spawn").Pool(min(workers, len(tasks))) as pool:
            rows = pool.map(sweep_point, tasks)
    return _result("sweep", list(PARAM_KEYS) + SWEEP_RESULT_COLUMNS, rows)


@command("discounted")
def cmd_discounted(cfg: RunConfig) -> Dict[str, Any]:
    """Discount-optimal thresholds; ``values`` lists V and the lookahead values per level instead."""
    p = cfg.params
    alpha = cfg.require("alpha")
    sol = solve_discounted(p, alpha, tol=cfg.option("tol"), method=cfg.option("method", "policy"),
                           L=cfg.option("levels"), settings=cfg.settings)
    if cfg.option("values", False):
        rows = [{"i": i,
                 "V_off": float(sol.V[i, 0]), "V_on": float(sol.V[i, 1]),
                 "Q0_off": float(sol.Q0[i, 0]), "Q1_off": float(sol.Q1[i, 0]),
                 "Q0_on": float(sol.Q0[i, 1]), "Q1_on": float(sol.Q1[i, 1]),
                 "action_off": sol.action(i, 0), "action_on": sol.action(i, 1)}
                for i in range(sol.L)]
        return _result("discounted", VALUES_COLUMNS, rows, params=p.to_dict())
    row = {
        "alpha": sol.alpha,
        "method": sol.method,
        "M_star": sol.M_star,
        "N_star": sol.N_star,
        "n_alpha": sol.n_alpha,
        "L": sol.L,
        "iterations": sol.iterations,
        "residual": sol.residual,
        "keep_on_level": keep_on_level(p, sol.alpha),
        "switch_off_bound": switch_off_bound(p),
        "n_star": n_star(p),
        "alpha_star": alpha_star(p),
    }
    return _result("discounted", DISCOUNTED_COLUMNS, [row], params=p.to_dict())


def _check(name: str, expected: str, observed: Any, passed: Optional[bool]) -> Dict[str, Any]:
    status = "report" if passed is None else ("pass" if passed else "fail")
    return {"check": name, "expected": expected, "observed": observed, "status": status}


@command("reproduce-example")
def cmd_reproduce_example(cfg: RunConfig) -> Dict[str, Any]:
    """
    Solve the reference instance end to end and compare with its known figures.

    Any failed check gives exit code 3. The discounted comparison only reports,
    since agreement with the average-optimal policy holds as alpha goes to zero.
    """
    p = REFERENCE_INSTANCE
    settings = cfg.settings
    rows = []
    warnings = []

    sol = solve_average(p, settings)
    rows.append(_check("lp M", str(EXAMPLE_M), sol.M, sol.M == EXAMPLE_M))
    rows.append(_check("lp N", "38 or 39", sol.N, sol.N in EXAMPLE_N))
    rows.append(_check("lp v", f"{EXAMPLE_V} +/- {EXAMPLE_V_TOL:g}", sol.v, abs(sol.v - EXAMPLE_V) <= EXAMPLE_V_TOL))
    rows.append(_check(f"lp v minus quoted {QUOTED_V}", "report", sol.v - QUOTED_V, None))
    if abs(sol.v - QUOTED_V) > 0.1:
        warnings.append(f"lp v {sol.v:.6f} differs from the quoted {QUOTED_V} by {sol.v - QUOTED_V:+.4f}")
    if sol.M is not None:
        N_exact, v_best, v_exact = _exact_neighbourhood(p, sol.M, sol.N, settings)
        gap = abs(sol.v - v_exact) / v_exact
        rows.append(_check("exact v of lp policy", f"rel gap <= {EXACT_REL_TOL:g}", gap, gap <= EXACT_REL_TOL))
        rows.append(_check("exact minimiser N", "38 or 39", N_exact, N_exact in EXAMPLE_N))

    N_best, v_zero = best_zero_n(p, settings)
    rows.append(_check("best (0,N) N", str(EXAMPLE_BEST_N), N_best, N_best == EXAMPLE_BEST_N))
    low, high = EXAMPLE_BEST_V_RANGE
    rows.append(_check("best (0,N) v", f"[{low}, {high}]", v_zero, low <= v_zero <= high))
    rows.append(_check("gap to best (0,N)", f">= {EXAMPLE_MIN_GAP}", v_zero - sol.v, v_zero - sol.v >= EXAMPLE_MIN_GAP))

    disc = solve_discounted(p, EXAMPLE_ALPHA, settings=settings)
    matched = disc.M_star == EXAMPLE_M and disc.N_star in EXAMPLE_N
    observed = f"({disc.M_star},{disc.N_star})"
    rows.append(_check(f"discounted thresholds at alpha={EXAMPLE_ALPHA:g}", "(4,38) or (4,39)", observed,
                       True if matched else None))
    if not matched:
        message = f"discounted thresholds {observed} at alpha={EXAMPLE_ALPHA:g} differ from the average-optimal policy"
        logger.warning(message)
        warnings.append(message)

    failed = [row["check"] for row in rows if row["status"] == "fail"]
    if failed:
        logger.error(f"reproduce-example: failed checks {failed}")
    return _result("reproduce-example", REPRODUCE_COLUMNS, rows, warnings,
                   exit_code=EXIT_SOLVER if failed else EXIT_OK, params=p.to_dict())


COMMANDS: Dict[str, Tuple[Callable[[RunConfig], Dict[str, Any]], bool]] = {
    "solve": (cmd_solve, True),
    "best0n": (cmd_best0n, True),
    "evaluate": (cmd_evaluate, True),
    "simulate": (cmd_simulate, True),
    "sweep": (cmd_sweep, False),
    "discounted": (cmd_discounted, True),
    "reproduce-example": (cmd_reproduce_example, False),
}


def build_config(name: str, flags: Mapping[str, Any], file_doc: Optional[Mapping[str, Any]] = None) -> RunConfig:
    if name not in COMMANDS:
        raise ValidationError("command", f"unknown command {name!r}")
    return build_run_config(name, flags, file_doc, needs_params=COMMANDS[name][1])


def run_command(name: str, flags: Mapping[str, Any], file_doc: Optional[Mapping[str, Any]] = None) -> Dict[str, Any]:
    """
    Build the run config for ``name`` and execute it.

    Args:
        name: command name
        flags: explicit values, overriding ``file_doc`` and the environment
        file_doc: flat JSON config document

    Returns:
        Result dictionary; configuration problems come back as exit code 2
    """
    try:
        cfg = build_config(name, flags, file_doc)
    except ValidationError as e:
        logger.error(f"{name}: invalid configuration: {e}")
        return return_error(str(e), e, command=name)
    return COMMANDS[name][0](cfg)
