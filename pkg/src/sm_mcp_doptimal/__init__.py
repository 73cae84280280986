"""D-optimal designs through canonical moments and Toda recurrences, with an MCP server."""

from .cli import main

__version__ = "0.1.0"
__all__ = ["main"]
