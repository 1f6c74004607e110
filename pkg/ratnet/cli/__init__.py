"""
Command-line interface for ratnet.
"""

from .main import cli, configure_logging

__all__ = ["cli", "configure_logging"]
