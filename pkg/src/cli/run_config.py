"""Run configuration assembled from command-line flags, a JSON config file and the environment."""

from dataclasses import dataclass, field
from typing import Any, Dict, Mapping, Optional, Tuple

from config.config_loader import get_config_value
from config.defaults import NumericSettings
from log_config.logging_config import get_logger
from model.params import ModelParams, PARAM_KEYS, validate_params
from utils.error_utils import ValidationError

logger = get_logger("CapacitySwitch.RunConfig")

OUTPUT_FORMATS = ("table", "csv", "json")

# command options by name; flags and JSON keys share these names
OPTION_TYPES = {
    "policy": str,
    "seed": int,
    "horizon": float,
    "warmup": float,
    "replications": int,
    "unit": str,
    "alpha": float,
    "method": str,
    "tol": float,
    "levels": int,
    "workers": int,
    "lp": bool,
    "values": bool,
}


def _number(key: str, value: Any) -> float:
    if isinstance(value, bool):
        raise ValidationError(key, f"expected a number, got {value!r}")
    if isinstance(value, (int, float)):
        return float(value)
    try:
        return float(str(value).strip())
    except ValueError:
        raise ValidationError(key, f"expected a number, got {value!r}") from None


def _convert(key: str, value: Any) -> Any:
    kind = OPTION_TYPES[key]
    if kind is str:
        return str(value)
    if kind is bool:
        if isinstance(value, bool):
            return value
        text = str(value).strip().lower()
        if text in ("1", "true", "yes", "on"):
            return True
        if text in ("0", "false", "no", "off"):
            return False
        raise ValidationError(key, f"expected a boolean, got {value!r}")
    number = _number(key, value)
    if kind is int:
        if number != int(number):
            raise ValidationError(key, f"expected an integer, got {value!r}")
        return int(number)
    return number


@dataclass(frozen=True)
class RunConfig:
    """
    Everything one command needs.

    ``params`` is None for commands that pin or sweep their own parameters and
    ``base`` then holds whatever parameter values were given.
    """

    command: str
    params: Optional[ModelParams]
    settings: NumericSettings
    options: Dict[str, Any] = field(default_factory=dict)
    grid: Tuple[Tuple[str, Tuple[float, ...]], ...] = ()
    base: Dict[str, float] = field(default_factory=dict)
    output_format: str = "table"
    output_path: Optional[str] = None
    logging: Optional[Dict[str, Any]] = None

    def option(self, key: str, default: Any = None) -> Any:
        value = self.options.get(key)
        return default if value is None else value

    def require(self, key: str) -> Any:
        value = self.options.get(key)
        if value is None:
            raise ValidationError(key, f"required by the {self.command} command")
        return value


def parse_grid_spec(spec: str) -> Tuple[str, Tuple[float, ...]]:
    """
    Parse one sweep axis of the form ``key=v1,v2,...``.

    Raises:
        ValidationError: unknown parameter key, empty or non-numeric values
    """
    key, sep, values = spec.partition("=")
    key = key.strip()
    if not sep or key not in PARAM_KEYS:
        raise ValidationError("grid", f"expected <param>=v1,v2,... with param in {PARAM_KEYS}, got {spec!r}")
    items = [v for v in values.split(",") if v.strip()]
    if not items:
        raise ValidationError("grid", f"no values for {key} in {spec!r}")
    return key, tuple(_number(key, v) for v in items)


def _grid_from(flags: Mapping[str, Any], file_doc: Mapping[str, Any]) -> Tuple[Tuple[str, Tuple[float, ...]], ...]:
    raw = flags.get("grid") or file_doc.get("grid") or ()
    if isinstance(raw, Mapping):
        axes = []
        for key, values in raw.items():
            if key not in PARAM_KEYS:
                raise ValidationError("grid", f"unknown parameter {key!r}")
            if not isinstance(values, (list, tuple)) or not values:
                raise ValidationError("grid", f"{key} needs a non-empty list of values")
            axes.append((key, tuple(_number(key, v) for v in values)))
    else:
        axes = [parse_grid_spec(spec) for spec in raw]
    keys = [k for k, _ in axes]
    if len(set(keys)) != len(keys):
        raise ValidationError("grid", f"parameter listed twice in {keys}")
    return tuple(axes)


def build_run_config(command: str, flags: Mapping[str, Any], file_doc: Optional[Mapping[str, Any]] = None,
                     needs_params: bool = True) -> RunConfig:
    """
    Merge command-line flags over the config file over CAPSWITCH_* environment variables.

    Args:
        command: subcommand name
        flags: parsed flags; None means "not given"
        file_doc: flat JSON config document
        needs_params: whether all six model parameters are required

    Returns:
        RunConfig

    Raises:
        ValidationError: missing parameter, bad value or unknown output format
    """
    file_doc = dict(file_doc or {})
    flags = dict(flags)

    grid = _grid_from(flags, file_doc) if command == "sweep" else ()
    swept = {key for key, _ in grid}

    base: Dict[str, float] = {}
    for key in PARAM_KEYS:
        value = get_config_value(key, flags, file_doc)
        if value is not None:
            base[key] = _number(key, value)

    params = None
    if needs_params:
        missing = [key for key in PARAM_KEYS if key not in base]
        if missing:
            raise ValidationError(missing[0], "missing model parameter (flag, config file or environment)")
        params = validate_params(ModelParams.from_mapping(base))
    elif grid:
        missing = [key for key in PARAM_KEYS if key not in base and key not in swept]
        if missing:
            raise ValidationError(missing[0], "missing model parameter (neither fixed nor swept)")

    options = {}
    for key in OPTION_TYPES:
        value = get_config_value(key, flags, file_doc)
        if value is not None:
            options[key] = _convert(key, value)

    settings = NumericSettings.from_mapping(file_doc)
    settings = NumericSettings.from_mapping(flags.get("settings") or {}, base=settings)

    output_format = get_config_value("format", flags, file_doc) or "table"
    if output_format not in OUTPUT_FORMATS:
        raise ValidationError("format", f"expected one of {OUTPUT_FORMATS}, got {output_format!r}")
    output_path = get_config_value("output", flags, file_doc)

    log_settings = file_doc.get("logging")
    if log_settings is not None and not isinstance(log_settings, Mapping):
        raise ValidationError("logging", "must be a JSON object")

    cfg = RunConfig(command=command, params=params, settings=settings, options=options, grid=grid, base=base,
                    output_format=output_format, output_path=output_path,
                    logging=dict(log_settings) if log_settings else None)
    logger.debug(f"Run config for {command}: params={base}, options={options}, grid={grid}")
    return cfg
