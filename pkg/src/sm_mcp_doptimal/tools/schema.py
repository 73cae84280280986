"""JSON-schema fragments shared by the tool declarations."""

from typing import Any

NUMBER_OR_TEXT = {
    "anyOf": [{"type": "number"}, {"type": "string"}],
    "description": 'A number, or exact text such as "1/3"',
}

MODEL_PROPERTIES: dict[str, Any] = {
    "m": {
        "type": "integer",
        "description": "Number of regression parameters (polynomial degree m - 1 before weighting)",
        "minimum": 1,
    },
    "beta": {
        "type": "array",
        "items": NUMBER_OR_TEXT,
        "description": "Prior roots beta_j of the weight prod_j (x - beta_j)^b_j. Default: []",
        "default": [],
    },
    "b": {
        "type": "array",
        "items": {"type": "integer", "minimum": 1},
        "description": "Multiplicities b_j of the prior roots. Default: []",
        "default": [],
    },
}

OPTIONS_PROPERTY = {
    "type": "object",
    "description": (
        "Solver options: restarts, max_iters, margin, tol, seed, workers, snap_tol, "
        "oracle_gap, grid_size"
    ),
}

MODE_PROPERTY = {
    "type": "string",
    "enum": ["float", "rational"],
    "description": "Arithmetic backend. Default: float",
    "default": "float",
}


def problem_document(kind: str, arguments: dict[str, Any], spec_keys: tuple[str, ...]) -> dict:
    """Problem document for `kind` from tool arguments."""
    return {
        "kind": kind,
        "spec": {k: arguments[k] for k in spec_keys if k in arguments},
        "options": arguments.get("options") or {},
        "mode": arguments.get("mode", "float"),
    }
