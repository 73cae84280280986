"""Problem documents and the dispatcher shared by the CLI and the MCP tools.

A problem document is one JSON object:

    {"kind": "dopt", "spec": {"m": 3, "beta": [2], "b": [1]},
     "options": {"restarts": 8, "seed": 0}, "mode": "float"}

`kind` is one of dopt, robust, maximin, oracle, check. When `spec` is absent
the remaining top-level fields are taken as the spec.
"""

import json
import logging
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from pathlib import Path
from typing import Any, Self

from .apps.maximin import MaximinSpec, solve_maximin
from .apps.robust import RobustSpec, solve_robust
from .checks import run_checks
from .config import SolveOptions
from .design.measure import DesignMeasure
from .design.optimize import solve
from .design.oracle import brute_force_search, info_matrix_det
from .design.toda import ModelSpec
from .errors import InvalidInputError
from .numeric import Mode, to_json

logger = logging.getLogger(__name__)

RESERVED_FIELDS = ("kind", "spec", "options", "mode")


class ProblemKind(str, Enum):
    """Solver a problem document is routed to."""

    DOPT = "dopt"
    ROBUST = "robust"
    MAXIMIN = "maximin"
    ORACLE = "oracle"
    CHECK = "check"


@dataclass(frozen=True)
class CheckSpec:
    """Size and selection of an invariant-suite run."""

    instances: int = 100
    checks: tuple[str, ...] = ()

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> Self:
        instances = data.get("instances", 100)
        if isinstance(instances, bool) or not isinstance(instances, int) or instances < 1:
            raise InvalidInputError(f"instances must be a positive integer, got {instances!r}")
        return cls(instances, tuple(data.get("checks", ())))

    def to_dict(self) -> dict[str, Any]:
        return {"instances": self.instances, "checks": list(self.checks)}


SpecType = ModelSpec | RobustSpec | MaximinSpec | CheckSpec


@dataclass
class ProblemFile:
    """A validated problem: kind, typed payload and option overrides."""

    kind: ProblemKind
    payload: SpecType
    options: dict[str, Any] = field(default_factory=dict)
    mode: Mode = Mode.FLOAT

    @classmethod
    def from_dict(cls, data: dict[str, Any], kind: ProblemKind | str | None = None) -> Self:
        """Validate a problem document; `kind` fills in or must match data["kind"]."""
        if not isinstance(data, dict):
            raise InvalidInputError("a problem document must be a JSON object")
        declared = data.get("kind")
        resolved = _kind(kind if kind is not None else declared)
        if declared is not None and _kind(declared) is not resolved:
            raise InvalidInputError(
                f"problem kind {declared!r} does not match command {resolved.value!r}"
            )
        spec = spec_fields(data)
        if not isinstance(spec, dict):
            raise InvalidInputError("spec must be a JSON object")
        options = data.get("options") or {}
        if not isinstance(options, dict):
            raise InvalidInputError("options must be a JSON object")
        mode = parse_mode(data.get("mode", Mode.FLOAT))
        return cls(resolved, build_payload(resolved, spec, mode), dict(options), mode)

    @classmethod
    def load(cls, path: str | Path, kind: ProblemKind | str | None = None) -> Self:
        """Read and validate a problem file."""
        return cls.from_dict(read_document(path), kind)

    def solve_options(self, overrides: dict[str, Any] | None = None) -> SolveOptions:
        """Environment defaults, then the document's options, then `overrides`."""
        return SolveOptions.from_env().merged(self.options).merged(overrides)

    def to_dict(self) -> dict[str, Any]:
        return {
            "kind": self.kind.value,
            "spec": self.payload.to_dict(),
            "options": self.options,
            "mode": self.mode.value,
        }


def read_document(path: str | Path) -> dict[str, Any]:
    """Parse a problem file into its JSON object."""
    try:
        text = Path(path).read_text()
    except OSError as e:
        raise InvalidInputError(f"cannot read problem file {path}: {e.strerror}") from e
    try:
        data = json.loads(text)
    except json.JSONDecodeError as e:
        raise InvalidInputError(f"problem file {path} is not valid JSON: {e.msg}") from e
    if not isinstance(data, dict):
        raise InvalidInputError("a problem document must be a JSON object")
    return data


def spec_fields(data: dict[str, Any]) -> dict[str, Any]:
    """The spec of a document: data["spec"], or every non-reserved top-level field."""
    if "spec" in data:
        return data["spec"]
    return {k: v for k, v in data.items() if k not in RESERVED_FIELDS}


def parse_mode(value: Any) -> Mode:
    try:
        return Mode(value)
    except ValueError as e:
        raise InvalidInputError(f"mode must be 'float' or 'rational', got {value!r}") from e


def _kind(value: Any) -> ProblemKind:
    if value is None:
        raise InvalidInputError("problem document has no 'kind'")
    try:
        return ProblemKind(value)
    except ValueError as e:
        choices = ", ".join(k.value for k in ProblemKind)
        raise InvalidInputError(f"unknown problem kind {value!r}; expected one of {choices}") from e


def build_payload(kind: ProblemKind, spec: dict[str, Any], mode: Mode = Mode.FLOAT) -> SpecType:
    """Typed spec for a problem kind."""
    if kind in (ProblemKind.DOPT, ProblemKind.ORACLE):
        return ModelSpec.from_dict(spec, mode)
    if kind is ProblemKind.ROBUST:
        return RobustSpec.from_dict(spec, mode)
    if kind is ProblemKind.MAXIMIN:
        return MaximinSpec.from_dict(spec, mode)
    return CheckSpec.from_dict(spec)


def _oracle_result(spec: ModelSpec, opts: SolveOptions, mode: Mode) -> dict[str, Any]:
    result = brute_force_search(spec, opts.grid_size)
    out = result.to_dict()
    out["diagnostics"]["grid_size"] = opts.grid_size
    if mode is Mode.RATIONAL:
        # grid points are k/(grid_size - 1); weights are taken at their float value
        step = opts.grid_size - 1
        support = [Fraction(x).limit_denominator(step) for x in result.measure.support]
        weights = [Fraction(w) for w in result.measure.weights]
        total = sum(weights)
        exact = DesignMeasure(
            result.measure.domain,
            tuple(support),
            tuple(w / total for w in weights),
            Mode.RATIONAL,
        )
        out["diagnostics"]["exact_determinant"] = to_json(info_matrix_det(exact, spec))
    return out


def _maximin_result(spec: MaximinSpec, opts: SolveOptions) -> dict[str, Any]:
    path = solve_maximin(spec, opts)
    out = path[-1].to_dict()
    out["diagnostics"]["path"] = [
        {
            "pexp": stage.diagnostics["pexp"],
            "power_mean": stage.objective,
            "min_gamma": stage.diagnostics["min_gamma"],
            "canonical_moments": stage.p_star.to_list(),
            "design": stage.measure.to_dict(),
        }
        for stage in path
    ]
    return out


def execute(problem: ProblemFile, overrides: dict[str, Any] | None = None) -> dict[str, Any]:
    """Run a validated problem and return its result document."""
    opts = problem.solve_options(overrides)
    spec = problem.payload
    logger.info(f"running {problem.kind.value} problem")
    match problem.kind:
        case ProblemKind.DOPT:
            return solve(spec, opts).to_dict()
        case ProblemKind.ROBUST:
            return solve_robust(spec, opts).to_dict()
        case ProblemKind.MAXIMIN:
            return _maximin_result(spec, opts)
        case ProblemKind.ORACLE:
            return _oracle_result(spec, opts, problem.mode)
        case ProblemKind.CHECK:
            report = run_checks(spec.instances, opts.seed, list(spec.checks) or None)
            return report.to_dict()
    raise InvalidInputError(f"unsupported problem kind {problem.kind}")
