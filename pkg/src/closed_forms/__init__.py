"""Closed-form quantities: discounted full-service values, busy periods, (0,N)-policies."""

from .discounted import (
    a_threshold,
    n_alpha,
    n_star,
    alpha_star,
    always_on_value,
    passive_value,
    full_service_value_off,
    keep_on_level,
    switch_off_bound,
)
from .busy_period import (
    BusyPeriodTable,
    busy_periods,
    t_between,
    tail_product,
    busy_period_from_series,
    MAX_RHO,
)
from .zero_n import (
    zero_n_queue_length,
    zero_n_average_cost,
    zero_n_cost_curve,
    n_tilde,
    best_zero_n,
)

__all__ = [
    'a_threshold',
    'n_alpha',
    'n_star',
    'alpha_star',
    'always_on_value',
    'passive_value',
    'full_service_value_off',
    'keep_on_level',
    'switch_off_bound',
    'BusyPeriodTable',
    'busy_periods',
    't_between',
    'tail_product',
    'busy_period_from_series',
    'MAX_RHO',
    'zero_n_queue_length',
    'zero_n_average_cost',
    'zero_n_cost_curve',
    'n_tilde',
    'best_zero_n',
]
