"""
Command-line front end.

Exit codes: 0 success, 2 invalid input or configuration, 3 solver failure.
"""

import argparse
import sys
from pathlib import Path
from typing import Any, Dict, List, Optional

from config.config_loader import load_config_file, default_config_path
from log_config.logging_config import setup_logging, get_logger
from utils.error_utils import ValidationError, return_error, EXIT_VALIDATION
from .commands import run_command
from .render import render
from .run_config import OUTPUT_FORMATS

logger = get_logger("CapacitySwitch.CLI")


def _setting(text: str) -> tuple:
    key, sep, value = text.partition("=")
    if not sep or not key.strip():
        raise argparse.ArgumentTypeError(f"expected key=value, got {text!r}")
    try:
        return key.strip(), float(value)
    except ValueError:
        raise argparse.ArgumentTypeError(f"{key.strip()} needs a number, got {value!r}") from None


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="flat JSON run config (default: $CAPSWITCH_CONFIG)")
    common.add_argument("--format", choices=OUTPUT_FORMATS, help="output format (default: table)")
    common.add_argument("--output", help="write the rendering to this file instead of stdout")
    common.add_argument("--set", dest="settings", type=_setting, action="append", metavar="KEY=VALUE",
                        help="override a numeric setting, e.g. --set support_threshold=1e-10")

    model = argparse.ArgumentParser(add_help=False)
    model.add_argument("--lambda", dest="lambda", type=float, help="arrival rate")
    model.add_argument("--mu", type=float, help="service rate per customer")
    model.add_argument("--h", type=float, help="holding cost rate per customer")
    model.add_argument("--c", type=float, help="running cost rate while on")
    model.add_argument("--s0", type=float, help="switch-off cost")
    model.add_argument("--s1", type=float, help="switch-on cost")

    parser = argparse.ArgumentParser(prog="capacityswitch",
                                     description="Optimal on/off switching of M/M/inf service capacity.")
    sub = parser.add_subparsers(dest="command", required=True)

    sub.add_parser("solve", parents=[common, model], help="average-optimal policy by linear programming")

    best = sub.add_parser("best0n", parents=[common, model], help="best (0,N)-policy")
    best.add_argument("--lp", action="store_true", default=None, help="also solve the restricted LP")

    evaluate = sub.add_parser("evaluate", parents=[common, model], help="exact average cost of a policy")
    evaluate.add_argument("--policy", help="mn:M,N, full:n or full")

    simulate = sub.add_parser("simulate", parents=[common, model], help="simulated average cost of a policy")
    simulate.add_argument("--policy", help="mn:M,N, full:n or full")
    simulate.add_argument("--seed", type=int)
    simulate.add_argument("--horizon", type=float, help="cycles or time units")
    simulate.add_argument("--warmup", type=float, help="discarded cycles or time")
    simulate.add_argument("--replications", type=int)
    simulate.add_argument("--unit", choices=("cycles", "time"))

    sweep = sub.add_parser("sweep", parents=[common, model], help="LP optimum against best (0,N) over a grid")
    sweep.add_argument("--grid", action="append", metavar="KEY=V1,V2,...", help="one grid axis (repeatable)")
    sweep.add_argument("--workers", type=int, help="worker processes (default 1)")

    discounted = sub.add_parser("discounted", parents=[common, model], help="discount-optimal thresholds")
    discounted.add_argument("--alpha", type=float, help="discount rate")
    discounted.add_argument("--method", choices=("policy", "value"))
    discounted.add_argument("--tol", type=float)
    discounted.add_argument("--levels", type=int, help="truncation level L")
    discounted.add_argument("--values", action="store_true", default=None, help="list values per level")

    sub.add_parser("reproduce-example", parents=[common], help="check the reference instance end to end")
    return parser


def _flags(ns: argparse.Namespace) -> Dict[str, Any]:
    flags = {key: value for key, value in vars(ns).items() if key not in ("command", "config", "settings")}
    flags["settings"] = dict(ns.settings or [])
    return flags


def _emit(text: str, output: Optional[str]) -> None:
    if output:
        Path(output).write_text(text, encoding="utf-8")
        logger.info(f"Wrote {output}")
    else:
        sys.stdout.write(text)


def run(argv: Optional[List[str]] = None, configure_logging: bool = False) -> int:
    """
    Parse ``argv``, run the command and print its rendering.

    Args:
        argv: arguments without the program name (sys.argv[1:] when None)
        configure_logging: install the loguru sinks, using the config file's ``logging`` object

    Returns:
        process exit code
    """
    ns = build_parser().parse_args(argv)
    output_format = ns.format or "table"
    try:
        file_doc = load_config_file(ns.config or default_config_path())
    except ValidationError as e:
        if configure_logging:
            setup_logging()
        sys.stdout.write(render(return_error(str(e), e, command=ns.command), output_format))
        return EXIT_VALIDATION

    if configure_logging:
        log_settings = file_doc.get("logging")
        setup_logging(log_settings if isinstance(log_settings, dict) else None)
    if ns.format is None and file_doc.get("format") in OUTPUT_FORMATS:
        output_format = file_doc["format"]

    result = run_command(ns.command, _flags(ns), file_doc)
    text = render(result, output_format)
    output = ns.output or file_doc.get("output")
    try:
        _emit(text, output)
    except OSError as e:
        sys.stderr.write(f"error: cannot write {output}: {e}\n")
        return EXIT_VALIDATION
    if output_format == "table":
        for message in result.get("warnings", []):
            sys.stderr.write(f"warning: {message}\n")
    return int(result["exit_code"])
