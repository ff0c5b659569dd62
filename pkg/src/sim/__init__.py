"""Monte Carlo oracle for average costs and busy periods."""

from .simulator import SimConfig, SimReport, simulate_policy, simulate_busy_period, MIN_CYCLES

__all__ = ['SimConfig', 'SimReport', 'simulate_policy', 'simulate_busy_period', 'MIN_CYCLES']
