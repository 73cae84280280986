"""Defaults, solver options and logging setup."""

import logging
import os
import sys
from dataclasses import asdict, dataclass, fields
from typing import Any, Self

from .errors import InvalidInputError

# Measure construction
ATOM_MERGE_TOL = 1e-10
WEIGHT_SUM_TOL = 1e-12
SYMMETRY_TOL = 1e-12

# Canonical moments
INTERIOR_MARGIN = 1e-14  # float-mode margin for interior canonical moments
TERMINAL_TOL = 1e-9  # float-mode p_k this close to {0,1} is terminal
MOMENT_REJECT_TOL = 1e-6  # float-mode p_k further outside [0,1] is rejected
LANCZOS_TOL = 1e-13  # relative residual norm that ends the Lanczos recursion
ZETA_TOL = 1e-12
DETERMINANT_TOL = 1e-14  # float-mode negativity allowance for Hankel determinants

# Toda sweeps
DEGENERATE_REL_TOL = 1e-9  # qd denominator relative to the terms it was formed from
OBJECTIVE_AGREEMENT_TOL = 1e-6  # Toda value against the determinant value

# Optimizer
DEFAULT_RESTARTS = 8
DEFAULT_MAX_ITERS = 20000
DEFAULT_MARGIN = 1e-7
DEFAULT_TOL = 1e-14
DEFAULT_SEED = 0
SNAP_TOL = 1e-6
POLISH_ROUNDS = 4

# Oracle
DEFAULT_GRID_SIZE = 201
WEIGHT_UPDATE_TOL = 1e-12
WEIGHT_UPDATE_MAX_ITERS = 20000

# Applications
DEFAULT_P_SCHEDULE = (-1.0, -2.0, -4.0, -8.0, -16.0, -32.0)
DEFAULT_CUBATURE_NODES = 16
PENALTY_FACTOR = 1e4
PENALTY_ESCALATION = 10.0

LOG_FORMAT = "%(asctime)s - %(name)s - %(levelname)s - %(message)s"


def setup_logging(level: str | None = None) -> None:
    """Configure logging on stderr; stdout is reserved for results."""
    level = (level or os.environ.get("SM_DOPT_LOG_LEVEL") or "INFO").upper()
    logging.basicConfig(level=level, format=LOG_FORMAT, stream=sys.stderr, force=True)


@dataclass(frozen=True)
class SolveOptions:
    """Options shared by every solver."""

    restarts: int = DEFAULT_RESTARTS
    max_iters: int = DEFAULT_MAX_ITERS
    margin: float = DEFAULT_MARGIN
    tol: float = DEFAULT_TOL
    seed: int = DEFAULT_SEED
    workers: int = 1
    snap_tol: float = SNAP_TOL
    oracle_gap: bool = False
    grid_size: int = DEFAULT_GRID_SIZE

    def __post_init__(self):
        if self.restarts < 1:
            raise InvalidInputError("restarts must be >= 1", details={"restarts": self.restarts})
        if not 0 < self.margin < 0.1:
            raise InvalidInputError("margin must lie in (0, 0.1)", details={"margin": self.margin})
        if self.max_iters < 1 or self.workers < 1:
            raise InvalidInputError("max_iters and workers must be positive")

    def to_dict(self) -> dict[str, Any]:
        """Convert to dictionary."""
        return asdict(self)

    @classmethod
    def from_dict(cls, data: dict[str, Any] | None) -> Self:
        """Create from dictionary, ignoring unknown keys."""
        data = data or {}
        known = {f.name for f in fields(cls)}
        unknown = sorted(set(data) - known)
        if unknown:
            raise InvalidInputError(f"Unknown option(s): {', '.join(unknown)}")
        return cls(**data)

    @classmethod
    def from_env(cls) -> Self:
        """Defaults overridden by SM_DOPT_* environment variables."""
        data: dict[str, Any] = {}
        for key, name in (
            ("restarts", "SM_DOPT_RESTARTS"),
            ("seed", "SM_DOPT_SEED"),
            ("workers", "SM_DOPT_WORKERS"),
        ):
            raw = os.environ.get(name)
            if raw:
                try:
                    data[key] = int(raw)
                except ValueError as e:
                    raise InvalidInputError(f"{name} must be an integer, got {raw!r}") from e
        return cls(**data)

    def merged(self, overrides: dict[str, Any] | None) -> "SolveOptions":
        """Return a copy with the non-None overrides applied."""
        data = self.to_dict()
        data.update({k: v for k, v in (overrides or {}).items() if v is not None})
        return SolveOptions.from_dict(data)
