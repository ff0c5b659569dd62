"""Configuration management module."""

from .config_loader import load_config_file, get_config_value, default_config_path
from .defaults import NumericSettings, DEFAULTS

__all__ = ['load_config_file', 'get_config_value', 'default_config_path', 'NumericSettings', 'DEFAULTS']
