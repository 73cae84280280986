"""Invariant-suite tool for the MCP server."""

import asyncio
from typing import Any

from mcp.types import Tool

from ..checks import CHECKS
from ..errors import DesignError
from ..problem import ProblemFile, execute

CHECK_TOOLS = [
    Tool(
        name="doptimal_check",
        description=(
            "Run the invariant suite on random exact-rational instances and report pass/fail "
            "counts per check."
        ),
        inputSchema={
            "type": "object",
            "properties": {
                "instances": {
                    "type": "integer",
                    "description": "Random instances per check. Default: 100",
                    "default": 100,
                    "minimum": 1,
                },
                "checks": {
                    "type": "array",
                    "items": {"type": "string", "enum": list(CHECKS)},
                    "description": "Checks to run. Default: all",
                },
                "seed": {"type": "integer", "description": "Seed. Default: 0", "default": 0},
            },
            "required": [],
        },
    ),
]


async def handle_check_tool(name: str, arguments: dict[str, Any]) -> dict[str, Any]:
    """Handle check tool calls."""
    try:
        if name == "doptimal_check":
            document = {
                "kind": "check",
                "spec": {k: arguments[k] for k in ("instances", "checks") if k in arguments},
                "options": {"seed": arguments.get("seed", 0)},
            }
            return await asyncio.to_thread(execute, ProblemFile.from_dict(document))

    except DesignError as e:
        return e.to_dict()

    return {"error": f"Unknown check tool: {name}"}
