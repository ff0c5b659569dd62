"""MCP resources."""

import json

from config.defaults import NumericSettings
from model.params import REFERENCE_INSTANCE


def get_settings_document(settings: NumericSettings) -> str:
    """
    Numeric defaults in force for the server, with the reference instance.

    Args:
        settings: numeric settings the tools run with

    Returns:
        JSON string
    """
    document = {
        "settings": settings.to_dict(),
        "reference_instance": REFERENCE_INSTANCE.to_dict(),
        "policy_syntax": ["mn:M,N", "full:n", "full"],
    }
    return json.dumps(document, indent=2)
