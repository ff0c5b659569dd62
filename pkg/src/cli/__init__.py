"""Command-line front end and the command functions behind it."""

from .run_config import RunConfig, build_run_config, parse_grid_spec, OUTPUT_FORMATS
from .commands import (
    cmd_solve,
    cmd_best0n,
    cmd_evaluate,
    cmd_simulate,
    cmd_sweep,
    cmd_discounted,
    cmd_reproduce_example,
    run_command,
    COMMANDS,
)
from .render import render, render_table, render_csv, render_json
from .app import run, build_parser

__all__ = [
    'RunConfig',
    'build_run_config',
    'parse_grid_spec',
    'OUTPUT_FORMATS',
    'cmd_solve',
    'cmd_best0n',
    'cmd_evaluate',
    'cmd_simulate',
    'cmd_sweep',
    'cmd_discounted',
    'cmd_reproduce_example',
    'run_command',
    'COMMANDS',
    'render',
    'render_table',
    'render_csv',
    'render_json',
    'run',
    'build_parser',
]
