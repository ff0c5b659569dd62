#!/usr/bin/env python3
"""
CapacitySwitch

Optimal on/off switching of the whole service capacity of an M/M/inf queue:
- Average-optimal (M,N)-policies by linear programming
- The best (0,N)-policy in closed form
- Exact and simulated policy evaluation
- Discount-optimal thresholds

``main.py <command> ...`` runs the command line; ``main.py serve`` starts the MCP
server on stdio transport.
"""

import sys
from typing import Optional, Dict, Any

from fastmcp import FastMCP

# Import logging configuration
from log_config.logging_config import setup_logging, get_logger
# Import configuration
from config.config_loader import load_config_file, default_config_path
from config.defaults import NumericSettings, DEFAULTS
from utils.error_utils import ValidationError
# Import command functions
from cli.app import run
from cli.commands import run_command
from mcp_resources.resources import get_settings_document

logger = get_logger("CapacitySwitch")

# Create FastMCP server instance
mcp = FastMCP("CapacitySwitch")


def _config_document() -> Dict[str, Any]:
    try:
        return load_config_file(default_config_path())
    except ValidationError as e:
        logger.warning(f"Ignoring run config: {e}")
        return {}


def _params(lam: float, mu: float, h: float, c: float, s0: float, s1: float) -> Dict[str, Any]:
    return {"lambda": lam, "mu": mu, "h": h, "c": c, "s0": s0, "s1": s1}


@mcp.tool()
def solve(lam: float, mu: float, h: float, c: float, s0: float, s1: float) -> Dict[str, Any]:
    """
    Average-optimal switching policy by linear programming.

    Args:
        lam: arrival rate
        mu: service rate per customer
        h: holding cost rate per customer
        c: running cost rate while the servers are on
        s0: switch-off cost
        s1: switch-on cost

    Returns:
        Dictionary with M, N, the optimal average cost v, n* and LP diagnostics
    """
    return run_command("solve", _params(lam, mu, h, c, s0, s1), _config_document())


@mcp.tool()
def best_zero_n(lam: float, mu: float, h: float, c: float, s0: float, s1: float,
                with_lp: bool = False) -> Dict[str, Any]:
    """
    Best (0,N)-policy: switch off when empty, on at N customers.

    Args:
        lam, mu, h, c, s0, s1: model parameters
        with_lp: also solve the LP restricted to (0,N)-policies

    Returns:
        Dictionary with N*, its average cost and the search start level
    """
    flags = _params(lam, mu, h, c, s0, s1)
    flags["lp"] = with_lp
    return run_command("best0n", flags, _config_document())


@mcp.tool()
def evaluate(lam: float, mu: float, h: float, c: float, s0: float, s1: float, policy: str) -> Dict[str, Any]:
    """
    Exact long-run average cost of a policy.

    Args:
        lam, mu, h, c, s0, s1: model parameters
        policy: "mn:M,N", "full:n" or "full"

    Returns:
        Dictionary with the policy label and its average cost
    """
    flags = _params(lam, mu, h, c, s0, s1)
    flags["policy"] = policy
    return run_command("evaluate", flags, _config_document())


@mcp.tool()
def simulate(lam: float, mu: float, h: float, c: float, s0: float, s1: float, policy: str,
             seed: int = 0, horizon: Optional[float] = None, warmup: Optional[float] = None,
             replications: Optional[int] = None, unit: Optional[str] = None) -> Dict[str, Any]:
    """
    Monte Carlo estimate of a policy's average cost with a 95% confidence interval.

    Args:
        lam, mu, h, c, s0, s1: model parameters
        policy: "mn:M,N", "full:n" or "full"
        seed: base seed; replication r uses seed + r
        horizon: cycles for (M,N)-policies, time units otherwise (default 10000)
        warmup: discarded cycles or time
        replications: independent replications
        unit: "cycles" or "time" to override the estimator choice

    Returns:
        Dictionary with the estimate, half-width, cost breakdown and warnings
    """
    flags = _params(lam, mu, h, c, s0, s1)
    flags.update(policy=policy, seed=seed, horizon=horizon, warmup=warmup, replications=replications, unit=unit)
    return run_command("simulate", flags, _config_document())


@mcp.tool()
def discounted(lam: float, mu: float, h: float, c: float, s0: float, s1: float, alpha: float,
               method: str = "policy", levels: Optional[int] = None) -> Dict[str, Any]:
    """
    Discount-optimal switch-off and switch-on levels.

    Args:
        lam, mu, h, c, s0, s1: model parameters
        alpha: discount rate
        method: "policy" (policy iteration) or "value" (value iteration)
        levels: truncation level (chosen automatically when omitted)

    Returns:
        Dictionary with M*, N*, n_alpha and the structural bounds
    """
    flags = _params(lam, mu, h, c, s0, s1)
    flags.update(alpha=alpha, method=method, levels=levels)
    return run_command("discounted", flags, _config_document())


@mcp.tool()
def reproduce_example() -> Dict[str, Any]:
    """
    Solve the reference instance (lambda=2, mu=1, h=1, c=100, s0=s1=100) and check
    the optimal (4, 38/39)-policy, its cost near 43.17 and the best (0,N)-policy near 51.03.

    Returns:
        Dictionary with one row per check
    """
    return run_command("reproduce-example", {}, _config_document())


@mcp.resource("capacityswitch://settings")
def get_settings_resource() -> str:
    """
    Numeric tolerances and truncation constants the tools run with.
    """
    try:
        settings = NumericSettings.from_mapping(_config_document())
    except ValidationError as e:
        logger.warning(f"Falling back to default settings: {e}")
        settings = DEFAULTS
    return get_settings_document(settings)


def serve():
    """Run the MCP server using stdio transport."""
    setup_logging()
    logger.info("Starting CapacitySwitch MCP Server")
    try:
        mcp.run()
    except KeyboardInterrupt:
        logger.info("Server stopped by user")
    except Exception as e:
        logger.exception(f"Server error: {e}")
        raise


def main():
    """Main entry point: ``serve`` starts the MCP server, anything else is a CLI command."""
    argv = sys.argv[1:]
    if argv[:1] == ["serve"]:
        serve()
        return
    sys.exit(run(argv, configure_logging=True))


if __name__ == "__main__":
    main()
