"""D-optimal design tools for the MCP server."""

import asyncio
from typing import Any

from mcp.types import Tool

from ..design.canonical import CanonicalSequence, canonical_to_moments, describe
from ..design.optimize import reconstruct_design
from ..design.oracle import multiset_hankel
from ..design.toda import ModelSpec, evaluate_objective, objective_depth
from ..errors import DesignError, InvalidInputError
from ..numeric import to_json
from ..problem import ProblemFile, execute, parse_mode
from .schema import MODE_PROPERTY, MODEL_PROPERTIES, OPTIONS_PROPERTY, problem_document

MODEL_KEYS = ("m", "beta", "b")

CANONICAL_PROPERTY = {
    "type": "array",
    "items": {"anyOf": [{"type": "number"}, {"type": "string"}]},
    "description": "Canonical moments p_1, p_2, ...; a 0 or 1 terminates the sequence",
}

DESIGN_TOOLS = [
    Tool(
        name="doptimal_solve",
        description=(
            "Compute the D-optimal design for polynomial regression of degree m - 1 weighted by "
            "prod_j (x - beta_j)^b_j on [0,1]. Returns support points, weights, canonical "
            "moments, the determinant of the information matrix and solver diagnostics."
        ),
        inputSchema={
            "type": "object",
            "properties": {**MODEL_PROPERTIES, "options": OPTIONS_PROPERTY},
            "required": ["m"],
        },
    ),
    Tool(
        name="doptimal_oracle",
        description=(
            "Slow reference search: exchange algorithm over a uniform grid of [0,1]. "
            "Use to cross-check doptimal_solve."
        ),
        inputSchema={
            "type": "object",
            "properties": {
                **MODEL_PROPERTIES,
                "options": OPTIONS_PROPERTY,
                "mode": MODE_PROPERTY,
            },
            "required": ["m"],
        },
    ),
    Tool(
        name="doptimal_reconstruct",
        description=(
            "Rebuild the design measure (support and weights) from a terminating sequence of "
            "canonical moments."
        ),
        inputSchema={
            "type": "object",
            "properties": {"canonical_moments": CANONICAL_PROPERTY, "mode": MODE_PROPERTY},
            "required": ["canonical_moments"],
        },
    ),
    Tool(
        name="doptimal_evaluate",
        description=(
            "Evaluate the determinant criterion H_m^(T) for given canonical moments through "
            "the Toda recurrence, and from the Hankel determinant when the moments are known."
        ),
        inputSchema={
            "type": "object",
            "properties": {
                **MODEL_PROPERTIES,
                "canonical_moments": CANONICAL_PROPERTY,
                "mode": MODE_PROPERTY,
            },
            "required": ["m", "canonical_moments"],
        },
    ),
]


def _canonical(arguments: dict[str, Any]) -> CanonicalSequence:
    values = arguments.get("canonical_moments")
    if not isinstance(values, list):
        raise InvalidInputError("canonical_moments must be a list")
    return CanonicalSequence.truncated(values, parse_mode(arguments.get("mode", "float")))


def reconstruct(arguments: dict[str, Any]) -> dict[str, Any]:
    """Design measure of a terminating canonical sequence."""
    p = _canonical(arguments)
    return {"design": reconstruct_design(p).to_dict(), "canonical_moments": describe(p)}


def evaluate(arguments: dict[str, Any]) -> dict[str, Any]:
    """H_m^(T) through the Toda chain, plus the determinant value when it is computable."""
    p = _canonical(arguments)
    spec = ModelSpec.from_dict({k: arguments[k] for k in MODEL_KEYS if k in arguments}, p.mode)
    depth = objective_depth(spec)
    value = evaluate_objective(p, spec)
    result: dict[str, Any] = {
        "objective": to_json(value),
        "depth": depth,
        "canonical_moments": describe(p),
    }
    if p.terminates or p.depth >= depth:
        result["determinant"] = to_json(multiset_hankel(canonical_to_moments(p, depth), spec))
    return result


async def handle_design_tool(name: str, arguments: dict[str, Any]) -> dict[str, Any]:
    """Handle design tool calls.

    Args:
        name: Tool name
        arguments: Tool arguments

    Returns:
        Tool result
    """
    try:
        if name == "doptimal_solve":
            problem = ProblemFile.from_dict(problem_document("dopt", arguments, MODEL_KEYS))
            return await asyncio.to_thread(execute, problem)

        elif name == "doptimal_oracle":
            problem = ProblemFile.from_dict(problem_document("oracle", arguments, MODEL_KEYS))
            return await asyncio.to_thread(execute, problem)

        elif name == "doptimal_reconstruct":
            return reconstruct(arguments)

        elif name == "doptimal_evaluate":
            return await asyncio.to_thread(evaluate, arguments)

    except DesignError as e:
        return e.to_dict()

    return {"error": f"Unknown design tool: {name}"}
