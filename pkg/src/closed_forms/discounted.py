"""Discounted values and thresholds of the full-service and passive policies."""

import math
from numbers import Real

from model.params import ModelParams
from model.policy import State
from utils.error_utils import ValidationError


def check_alpha(alpha: float) -> float:
    if not (isinstance(alpha, Real) and not isinstance(alpha, bool) and math.isfinite(alpha)) or alpha <= 0:
        raise ValidationError("alpha", f"discount rate must be > 0, got {alpha!r}")
    return float(alpha)


def a_threshold(p: ModelParams, alpha: float) -> float:
    """
    Switch-on threshold A(alpha) = (mu + alpha)(c + alpha s1) / (h mu) of the full-service class.

    Raises:
        ValidationError: alpha <= 0
    """
    alpha = check_alpha(alpha)
    return (p.mu + alpha) * (p.c + alpha * p.s1) / (p.h * p.mu)


def n_alpha(p: ModelParams, alpha: float) -> int:
    """Best full-service switch-on level ceil(A(alpha)); at integer A both A and A+1 are optimal."""
    return int(math.ceil(a_threshold(p, alpha)))


def n_star(p: ModelParams) -> int:
    """floor(c/h + 1): the full-service level optimal for all small discount rates, at least 1."""
    return int(math.floor(p.c / p.h + 1.0))


def alpha_star(p: ModelParams) -> float:
    """
    Largest discount rate with n_alpha equal to n_star.

    A(alpha) <= n_star is the quadratic inequality
    s1 alpha^2 + (c + mu s1) alpha + mu c - n_star h mu <= 0, whose constant term is negative.

    Returns:
        The positive root (the linear root when s1 = 0)
    """
    n = n_star(p)
    a = p.s1
    b = p.c + p.mu * p.s1
    q = p.mu * p.c - n * p.h * p.mu
    if a == 0:
        return -q / b
    # stable form of the positive root
    return (-2.0 * q) / (b + math.sqrt(b * b - 4.0 * a * q))


def always_on_value(p: ModelParams, alpha: float, s: State) -> float:
    """
    Discounted cost of switching on at once (if off) and never switching off.

    (1-delta) s1 + h i/(mu+alpha) + h lambda/(alpha (mu+alpha)) + c/alpha
    """
    alpha = check_alpha(alpha)
    return ((1 - s.delta) * p.s1 + p.h * s.i / (p.mu + alpha)
            + p.h * p.lam / (alpha * (p.mu + alpha)) + p.c / alpha)


def passive_value(p: ModelParams, alpha: float, i: int) -> float:
    """Discounted cost of never switching on from (i, 0): h i/alpha + h lambda/alpha^2."""
    alpha = check_alpha(alpha)
    return p.h * i / alpha + p.h * p.lam / (alpha * alpha)


def full_service_value_off(p: ModelParams, alpha: float, i: int) -> float:
    """
    Optimal discounted cost U(i,0) within the policies that never switch a running system off.

    Below n_alpha the system waits, off, for n_alpha - i arrivals and then pays U(n_alpha, 0);
    at or above n_alpha it switches on immediately.

    Args:
        p: model parameters
        alpha: discount rate
        i: customers present, system off

    Returns:
        U(i, 0)
    """
    n = n_alpha(p, alpha)
    on_now = p.s1 + always_on_value(p, alpha, State(max(i, n), 1))
    if i >= n:
        return on_now
    ratio = p.lam / (p.lam + alpha)
    waiting = 0.0
    weight = 1.0
    for k in range(n - i):
        waiting += weight * p.h * (i + k) / (p.lam + alpha)
        weight *= ratio
    return waiting + weight * on_now


def keep_on_level(p: ModelParams, alpha: float) -> float:
    """
    Level from which every discount-optimal policy keeps a running system on.

    (h lambda + c (mu+alpha) - s0 alpha (mu+alpha)) / (h mu)
    """
    alpha = check_alpha(alpha)
    return (p.h * p.lam + p.c * (p.mu + alpha) - p.s0 * alpha * (p.mu + alpha)) / (p.h * p.mu)


def switch_off_bound(p: ModelParams) -> float:
    """Upper bound on the switch-off level M*_alpha valid for every alpha; infinite when s0 = 0."""
    if p.s0 == 0:
        return math.inf
    return p.rho + (p.c + p.s0 * p.mu) ** 2 / (4.0 * p.s0 * p.h * p.mu)
