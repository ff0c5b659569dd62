"""JSON-safety helpers for result dictionaries."""

import math
from typing import Dict, Any

import numpy as np


def to_jsonable(value: Any) -> Any:
    """
    Convert one value into something ``json.dumps`` accepts.

    numpy scalars become Python scalars, arrays become lists, non-finite
    floats become their string names so the output stays strict JSON.
    """
    if isinstance(value, np.generic):
        value = value.item()
    if isinstance(value, float) and not math.isfinite(value):
        return str(value)
    if isinstance(value, np.ndarray):
        return [to_jsonable(v) for v in value.tolist()]
    if isinstance(value, dict):
        return clean_dict_for_json(value)
    if isinstance(value, (list, tuple)):
        return [to_jsonable(v) for v in value]
    return value


def clean_dict_for_json(data: Dict[str, Any]) -> Dict[str, Any]:
    """
    Recursively clean every value of a dictionary for JSON output.

    Args:
        data: dictionary that may hold numpy values

    Returns:
        Dictionary with JSON-safe values
    """
    return {str(key): to_jsonable(value) for key, value in data.items()}
