"""Error types raised by the design solvers."""

from typing import Any

# Exit codes used by the CLI
EXIT_OK = 0
EXIT_INFEASIBLE = 1
EXIT_INVALID_INPUT = 2


class DesignError(Exception):
    """Base error for all design computations."""

    code = "DesignError"
    exit_code = EXIT_INVALID_INPUT

    def __init__(self, message: str, details: Any = None):
        super().__init__(message)
        self.message = message
        self.details = details

    def to_dict(self) -> dict[str, Any]:
        """Convert to the structured error document."""
        data: dict[str, Any] = {"error": self.code, "message": self.message}
        if self.details is not None:
            data["details"] = self.details
        return data


class InvalidInputError(DesignError):
    """Malformed spec, option or problem file."""

    code = "InvalidInput"


class AsymmetricInputError(DesignError):
    """Measure on [-1,1] is not symmetric about the origin."""

    code = "AsymmetricInput"


class InsufficientMomentsError(DesignError):
    """Not enough moments for the requested determinant."""

    code = "InsufficientMoments"


class InsufficientDepthError(DesignError):
    """Canonical sequence too short for the requested quantity."""

    code = "InsufficientDepth"


class InvalidMomentSequenceError(DesignError):
    """Moments are not the moments of a measure on [0,1]."""

    code = "InvalidMomentSequence"


class BoundaryMomentPointError(DesignError):
    """Moment prefix already lies on the moment-space boundary."""

    code = "BoundaryMomentPoint"


class InvalidZetaError(DesignError):
    """Zeta values do not map back to canonical moments in [0,1]."""

    code = "InvalidZeta"


class NonTerminatingSequenceError(DesignError):
    """Canonical sequence has no terminal value in {0,1}."""

    code = "NonTerminatingSequence"


class DegenerateStepError(DesignError):
    """A qd/Toda sweep hit a vanishing denominator."""

    code = "DegenerateStep"
    exit_code = EXIT_INFEASIBLE


class ZeroDenominatorError(DesignError):
    """A determinant ratio has a vanishing denominator."""

    code = "ZeroDenominator"
    exit_code = EXIT_INFEASIBLE


class SingularInformationMatrixError(DesignError):
    """No nonsingular starting design for the exchange search."""

    code = "SingularInformationMatrix"
    exit_code = EXIT_INFEASIBLE


class NoFeasiblePointError(DesignError):
    """Every optimizer start was degenerate or nonpositive."""

    code = "NoFeasiblePoint"
    exit_code = EXIT_INFEASIBLE


class InfeasibleBudgetError(DesignError):
    """No start satisfied the robust bias budget."""

    code = "InfeasibleBudget"
    exit_code = EXIT_INFEASIBLE


class NonfinitePowerError(DesignError):
    """gamma is nonpositive somewhere on the cubature grid."""

    code = "NonfinitePower"
    exit_code = EXIT_INFEASIBLE
