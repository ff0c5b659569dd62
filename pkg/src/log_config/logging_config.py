import os
import sys
from pathlib import Path
from typing import Any, Dict, Mapping, Optional

from loguru import logger

LOG_FORMAT = "{time:YYYY-MM-DD HH:mm:ss.SSS} | {level: <8} | {name}:{function}:{line} - {message}"

LOG_DEFAULTS: Dict[str, str] = {
    "console_level": "INFO",
    "file_level": "DEBUG",
    "rotation": "1 day",
    "retention": "1 week",
    "compression": "zip",
}


def get_log_dir() -> Path:
    """
    Get the log directory.

    Returns:
        Path: ~/.capacityswitch/logs unless CAPSWITCH_LOG_DIR is set
    """
    override = os.getenv("CAPSWITCH_LOG_DIR")
    return Path(override) if override else Path.home() / ".capacityswitch" / "logs"


def resolve_log_settings(settings: Optional[Mapping[str, Any]] = None) -> Dict[str, str]:
    """The run config's ``logging`` object wins; without one, LOG_<KEY> environment variables apply."""
    resolved = dict(LOG_DEFAULTS)
    if settings:
        resolved.update({key: str(settings[key]) for key in LOG_DEFAULTS if key in settings})
    else:
        resolved.update({key: os.environ[f"LOG_{key.upper()}"] for key in LOG_DEFAULTS
                         if f"LOG_{key.upper()}" in os.environ})
    return resolved


def _add_file_sink(path: Path, level: str, options: Dict[str, str], errors_only: bool) -> None:
    def level_filter(record) -> bool:
        return (record["level"].name == "ERROR") == errors_only

    logger.add(str(path), level=level, format=LOG_FORMAT, filter=level_filter,
               rotation=options["rotation"], retention=options["retention"],
               compression=options["compression"], enqueue=True, backtrace=True, diagnose=True)


def setup_logging(settings: Optional[Mapping[str, Any]] = None) -> None:
    """
    Configure loguru sinks for the CLI and the MCP server.

    stderr gets the console level without colour; ``app.log`` collects everything
    but errors and ``err.log`` the errors, both rotated by loguru.

    Args:
        settings: optional ``logging`` object from the JSON run config
    """
    options = resolve_log_settings(settings)
    log_dir = get_log_dir()
    log_dir.mkdir(parents=True, exist_ok=True)

    logger.remove()
    # stdout carries command output and MCP stdio traffic
    logger.add(sys.stderr, level=options["console_level"], format=LOG_FORMAT, colorize=False)
    _add_file_sink(log_dir / "app.log", options["file_level"], options, errors_only=False)
    _add_file_sink(log_dir / "err.log", "ERROR", options, errors_only=True)


def get_logger(name: str = None):
    """
    Get a logger bound to a component name.

    Args:
        name: logger name, conventionally ``CapacitySwitch.<Component>``

    Returns:
        loguru.Logger: bound logger
    """
    if name:
        return logger.bind(name=name)
    else:
        return logger
