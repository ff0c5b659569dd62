"""MCP resources module."""

from .resources import get_settings_document

__all__ = ['get_settings_document']
