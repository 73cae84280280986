"""Robust and maximin design tools for the MCP server."""

import asyncio
from typing import Any

from mcp.types import Tool

from ..config import DEFAULT_CUBATURE_NODES, DEFAULT_P_SCHEDULE
from ..errors import DesignError
from ..problem import ProblemFile, execute
from .schema import MODEL_PROPERTIES, OPTIONS_PROPERTY, problem_document

APPLICATION_TOOLS = [
    Tool(
        name="doptimal_robust",
        description=(
            "Robust D-optimal design on [-1,1] for a polynomial model contaminated by "
            "x^m psi(x) with |psi(x)| <= |x|^alpha. Maximizes the determinant over symmetric "
            "designs subject to the bias bound d."
        ),
        inputSchema={
            "type": "object",
            "properties": {
                **MODEL_PROPERTIES,
                "alpha": {
                    "type": "integer",
                    "description": "Exponent of the contamination bound |x|^alpha",
                    "minimum": 0,
                },
                "d": {"type": "number", "description": "Bias budget, must be positive"},
                "options": OPTIONS_PROPERTY,
            },
            "required": ["m", "alpha", "d"],
        },
    ),
    Tool(
        name="doptimal_maximin",
        description=(
            "Maximin design for estimating sum_k g_k(theta_k) over a parameter box. Follows "
            "a schedule of negative power means and returns the final design together with "
            "the design path."
        ),
        inputSchema={
            "type": "object",
            "properties": {
                **MODEL_PROPERTIES,
                "g": {
                    "type": "array",
                    "items": {"type": "array", "items": {"type": "number"}},
                    "description": "Coefficients of g_k in increasing degree, one list per k",
                },
                "theta_box": {
                    "type": "array",
                    "items": {"type": "array", "items": {"type": "number"}},
                    "description": "Interval [s_k, t_k] for each theta_k",
                },
                "p_schedule": {
                    "type": "array",
                    "items": {"type": "number"},
                    "description": (
                        "Strictly decreasing negative exponents. "
                        f"Default: {list(DEFAULT_P_SCHEDULE)}"
                    ),
                },
                "nodes": {
                    "type": "integer",
                    "description": (
                        f"Gauss-Legendre nodes per axis. Default: {DEFAULT_CUBATURE_NODES}"
                    ),
                    "minimum": 1,
                },
                "options": OPTIONS_PROPERTY,
            },
            "required": ["m", "g", "theta_box"],
        },
    ),
]

ROBUST_KEYS = ("m", "alpha", "d", "beta", "b")
MAXIMIN_KEYS = ("m", "beta", "b", "g", "theta_box", "p_schedule", "nodes")


async def handle_application_tool(name: str, arguments: dict[str, Any]) -> dict[str, Any]:
    """Handle robust and maximin tool calls.

    Args:
        name: Tool name
        arguments: Tool arguments

    Returns:
        Tool result
    """
    try:
        if name == "doptimal_robust":
            problem = ProblemFile.from_dict(problem_document("robust", arguments, ROBUST_KEYS))
            return await asyncio.to_thread(execute, problem)

        elif name == "doptimal_maximin":
            problem = ProblemFile.from_dict(problem_document("maximin", arguments, MAXIMIN_KEYS))
            return await asyncio.to_thread(execute, problem)

    except DesignError as e:
        return e.to_dict()

    return {"error": f"Unknown application tool: {name}"}
