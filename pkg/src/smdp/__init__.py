"""Truncated semi-Markov decision process with an aggregated boundary."""

from .instance import (
    SmdpInstance,
    BoundaryQuantities,
    boundary_quantities,
    build_smdp,
    build_zero_n_smdp,
    zero_n_action_mask,
    dump_csv,
    state_index,
)

__all__ = [
    'SmdpInstance',
    'BoundaryQuantities',
    'boundary_quantities',
    'build_smdp',
    'build_zero_n_smdp',
    'zero_n_action_mask',
    'dump_csv',
    'state_index',
]
