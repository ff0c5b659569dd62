"""Domain types of the switched M/M/inf system."""

from .params import ModelParams, validate_params, PARAM_KEYS, REFERENCE_INSTANCE
from .policy import (
    Action,
    State,
    StationaryPolicy,
    MNPolicy,
    FullServicePolicy,
    TablePolicy,
    policy_action,
    parse_policy,
)

__all__ = [
    'ModelParams',
    'validate_params',
    'PARAM_KEYS',
    'REFERENCE_INSTANCE',
    'Action',
    'State',
    'StationaryPolicy',
    'MNPolicy',
    'FullServicePolicy',
    'TablePolicy',
    'policy_action',
    'parse_policy',
]
