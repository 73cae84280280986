"""MCP tools for the design solvers."""

from .applications import APPLICATION_TOOLS, handle_application_tool
from .checks import CHECK_TOOLS, handle_check_tool
from .design import DESIGN_TOOLS, handle_design_tool

ALL_TOOLS = DESIGN_TOOLS + APPLICATION_TOOLS + CHECK_TOOLS

__all__ = [
    "ALL_TOOLS",
    "APPLICATION_TOOLS",
    "CHECK_TOOLS",
    "DESIGN_TOOLS",
    "handle_application_tool",
    "handle_check_tool",
    "handle_design_tool",
]
