"""Configuration loader for CapacitySwitch."""

import os
import json
from pathlib import Path
from typing import Optional, Dict, Any, Mapping

from dotenv import load_dotenv

from log_config.logging_config import get_logger
from utils.error_utils import ValidationError

# Load environment variables
load_dotenv()

logger = get_logger("CapacitySwitch.Config")

CONFIG_PATH_ENV = "CAPSWITCH_CONFIG"
ENV_PREFIX = "CAPSWITCH_"


def default_config_path() -> Optional[str]:
    """
    Default run-config path taken from the CAPSWITCH_CONFIG environment variable.

    Returns:
        Path string, or None when the variable is unset or still holds a placeholder
    """
    path = os.environ.get(CONFIG_PATH_ENV)
    if not path:
        return None
    if "${" in path or "$(" in path:
        logger.info(f"{CONFIG_PATH_ENV} contains an unexpanded placeholder: {path}, ignoring it")
        return None
    return path


def load_config_file(path: Optional[str]) -> Dict[str, Any]:
    """
    Load a flat JSON run config.

    Args:
        path: config file path; None means no file

    Returns:
        Dictionary with the file contents, or an empty dict when path is None

    Raises:
        ValidationError: if the file is missing, unreadable or not a JSON object
    """
    if not path:
        return {}

    config_file = Path(path)
    logger.info(f"Reading run config: {config_file}")
    if not config_file.is_file():
        raise ValidationError("config", f"config file does not exist: {config_file}")

    try:
        with open(config_file, 'r', encoding='utf-8') as f:
            config = json.load(f)
    except json.JSONDecodeError as e:
        raise ValidationError("config", f"malformed JSON in {config_file}: {e}") from e
    except OSError as e:
        raise ValidationError("config", f"cannot read {config_file}: {e}") from e

    if not isinstance(config, dict):
        raise ValidationError("config", f"{config_file} must hold a JSON object")
    logger.debug(f"Run config contents: {json.dumps(config, indent=2, ensure_ascii=False)}")
    return config


def get_config_value(key: str, *sources: Mapping[str, Any], env_key: str = None) -> Optional[Any]:
    """
    Get a configuration value from layered sources.

    Args:
        key: key name in the sources
        *sources: mappings in priority order (command-line flags first, then the config file)
        env_key: environment variable consulted last (defaults to CAPSWITCH_<KEY>)

    Returns:
        The first value that is not None, or None
    """
    for source in sources:
        value = source.get(key)
        if value is not None:
            return value
    env_key = env_key or ENV_PREFIX + key.upper().replace("-", "_")
    return os.environ.get(env_key)
