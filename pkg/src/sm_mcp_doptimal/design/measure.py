"""Design measures and their ordinary moments."""

import math
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from typing import Any, Self

from ..config import ATOM_MERGE_TOL, SYMMETRY_TOL, WEIGHT_SUM_TOL
from ..errors import AsymmetricInputError, InvalidInputError
from ..numeric import Mode, Number, coerce, coerce_all, to_json


class Domain(str, Enum):
    """Design space of a measure."""

    UNIT = "unit"  # [0, 1]
    SYMMETRIC = "symmetric"  # [-1, 1]

    @property
    def bounds(self) -> tuple[int, int]:
        return (0, 1) if self is Domain.UNIT else (-1, 1)


@dataclass(frozen=True)
class DesignMeasure:
    """Finitely supported probability measure on [0,1] or [-1,1].

    Float atoms closer than ATOM_MERGE_TOL are merged on construction and may
    overshoot the domain by as much before being clamped; rational atoms merge
    only when equal and must lie in the domain exactly. The support is stored
    in ascending order.
    """

    domain: Domain
    support: tuple[Number, ...]
    weights: tuple[Number, ...]
    mode: Mode = Mode.FLOAT

    def __post_init__(self):
        domain = Domain(self.domain)
        if len(self.support) != len(self.weights):
            raise InvalidInputError(
                "support and weights differ in length",
                details={"support": len(self.support), "weights": len(self.weights)},
            )
        if not self.support:
            raise InvalidInputError("a design measure needs at least one atom")
        support = coerce_all(self.support, self.mode)
        weights = coerce_all(self.weights, self.mode)

        lo, hi = domain.bounds
        slack = 0 if self.mode is Mode.RATIONAL else ATOM_MERGE_TOL
        for x in support:
            if x < lo - slack or x > hi + slack:
                raise InvalidInputError(f"support point {x} outside [{lo}, {hi}]")
        for w in weights:
            if not w > 0:
                raise InvalidInputError(f"weights must be strictly positive, got {w}")

        total = sum(weights)
        if self.mode is Mode.RATIONAL:
            if total != 1:
                raise InvalidInputError(f"weights sum to {total}, not 1")
        elif abs(total - 1.0) > WEIGHT_SUM_TOL:
            raise InvalidInputError(f"weights sum to {total!r}, not 1")

        merged_x: list[Number] = []
        merged_w: list[Number] = []
        for x, w in sorted(zip(support, weights), key=lambda a: a[0]):
            if merged_x and _same_point(merged_x[-1], x, self.mode):
                merged_w[-1] += w
            else:
                merged_x.append(min(max(x, lo), hi) if self.mode is Mode.FLOAT else x)
                merged_w.append(w)

        object.__setattr__(self, "domain", domain)
        object.__setattr__(self, "support", tuple(merged_x))
        object.__setattr__(self, "weights", tuple(merged_w))

    def __len__(self) -> int:
        return len(self.support)

    @property
    def atoms(self) -> list[tuple[Number, Number]]:
        return list(zip(self.support, self.weights))

    def to_dict(self) -> dict[str, Any]:
        """Convert to the JSON document form."""
        return {
            "domain": self.domain.value,
            "support": [to_json(x) for x in self.support],
            "weights": [to_json(w) for w in self.weights],
        }

    @classmethod
    def from_dict(cls, data: dict[str, Any], mode: Mode | None = None) -> Self:
        """Create from the JSON document form."""
        try:
            support = data["support"]
            weights = data["weights"]
        except KeyError as e:
            raise InvalidInputError(f"measure is missing field {e.args[0]!r}") from e
        if mode is None:
            mode = Mode.RATIONAL if all(isinstance(v, str) for v in [*support, *weights]) \
                else Mode.infer([*support, *weights])
        return cls(
            domain=Domain(data.get("domain", "unit")),
            support=coerce_all(support, mode),
            weights=coerce_all(weights, mode),
            mode=mode,
        )


def _same_point(a: Number, b: Number, mode: Mode) -> bool:
    if mode is Mode.RATIONAL:
        return a == b
    return abs(a - b) < ATOM_MERGE_TOL


@dataclass(frozen=True)
class MomentSequence:
    """Ordinary moments c_0..c_K of a probability measure."""

    values: tuple[Number, ...]
    domain: Domain = Domain.UNIT
    mode: Mode = Mode.FLOAT
    source: str = field(default="", compare=False)

    def __post_init__(self):
        values = coerce_all(self.values, self.mode)
        if not values:
            raise InvalidInputError("a moment sequence needs at least c_0")
        c0 = values[0]
        if (self.mode is Mode.RATIONAL and c0 != 1) or (
            self.mode is Mode.FLOAT and abs(c0 - 1.0) > WEIGHT_SUM_TOL
        ):
            raise InvalidInputError(f"c_0 must be 1, got {c0}")
        object.__setattr__(self, "values", values)
        object.__setattr__(self, "domain", Domain(self.domain))

    def __len__(self) -> int:
        return len(self.values)

    def __getitem__(self, k: int) -> Number:
        return self.values[k]

    @property
    def order(self) -> int:
        """Highest available moment index K."""
        return len(self.values) - 1

    @classmethod
    def of(cls, values, domain: Domain = Domain.UNIT, mode: Mode | None = None) -> Self:
        """Build from raw values, inferring the backend when not given."""
        values = list(values)
        return cls(tuple(values), domain, mode or Mode.infer(values))


def moments(mu: DesignMeasure, K: int) -> MomentSequence:
    """c_k = sum_i w_i x_i^k for k = 0..K."""
    if K < 0:
        raise InvalidInputError(f"K must be nonnegative, got {K}")
    one = Fraction(1) if mu.mode is Mode.RATIONAL else 1.0
    values = []
    for k in range(K + 1):
        values.append(sum((w * x**k for x, w in mu.atoms), start=one * 0))
    values[0] = one
    return MomentSequence(tuple(values), mu.domain, mu.mode)


def _exact_sqrt(t: Fraction) -> Fraction | None:
    num, den = t.numerator, t.denominator
    rn, rd = math.isqrt(num), math.isqrt(den)
    if rn * rn == num and rd * rd == den:
        return Fraction(rn, rd)
    return None


def symmetrize(mu: DesignMeasure) -> DesignMeasure:
    """Map mu on [0,1] to the symmetric xi on [-1,1] with mu([0,x^2]) = xi([-x,x]).

    Rational measures stay rational only when every support point is a
    rational square; otherwise the result is produced in float mode.
    """
    if mu.domain is not Domain.UNIT:
        raise InvalidInputError("symmetrize expects a measure on [0,1]")
    mode = mu.mode
    roots: list[Number] = []
    if mode is Mode.RATIONAL:
        exact = [_exact_sqrt(t) for t in mu.support]
        if all(r is not None for r in exact):
            roots = exact
        else:
            mode = Mode.FLOAT
    if mode is Mode.FLOAT:
        roots = [math.sqrt(float(t)) for t in mu.support]

    support: list[Number] = []
    weights: list[Number] = []
    for r, w in zip(roots, mu.weights):
        w = coerce(w, mode)
        if r == 0:
            support.append(r)
            weights.append(w)
        else:
            support.extend([-r, r])
            weights.extend([w / 2, w / 2])
    return DesignMeasure(Domain.SYMMETRIC, tuple(support), tuple(weights), mode)


def is_symmetric(xi: DesignMeasure, tol: float = SYMMETRY_TOL) -> bool:
    """True when support and weights match under negation."""
    atoms = xi.atoms
    mirrored = sorted(((-x, w) for x, w in atoms), key=lambda a: a[0])
    for (x, w), (y, v) in zip(atoms, mirrored):
        if xi.mode is Mode.RATIONAL:
            if x != y or w != v:
                return False
        elif abs(x - y) > tol or abs(w - v) > tol:
            return False
    return True


def desymmetrize(xi: DesignMeasure) -> DesignMeasure:
    """Inverse of symmetrize: atoms +-x merge into x^2 with summed weight."""
    if xi.domain is not Domain.SYMMETRIC:
        raise InvalidInputError("desymmetrize expects a measure on [-1,1]")
    if not is_symmetric(xi):
        raise AsymmetricInputError(
            "measure is not symmetric about 0",
            details=xi.to_dict(),
        )
    support: list[Number] = []
    weights: list[Number] = []
    for x, w in xi.atoms:
        at_origin = x == 0 or (xi.mode is Mode.FLOAT and abs(x) < ATOM_MERGE_TOL)
        if at_origin:
            support.append(x * 0)
            weights.append(w)
        elif x > 0:
            support.append(x * x)
            weights.append(2 * w)
    if xi.mode is Mode.FLOAT:
        total = sum(weights)
        weights = [w / total for w in weights]
    return DesignMeasure(Domain.UNIT, tuple(support), tuple(weights), xi.mode)


def to_unit_interval(xi: DesignMeasure) -> DesignMeasure:
    """Transport a measure on [-1,1] to [0,1] by x -> (x+1)/2."""
    if xi.domain is not Domain.SYMMETRIC:
        raise InvalidInputError("expected a measure on [-1,1]")
    support = tuple((x + 1) / 2 for x in xi.support)
    return DesignMeasure(Domain.UNIT, support, xi.weights, xi.mode)


def to_symmetric_interval(mu: DesignMeasure) -> DesignMeasure:
    """Transport a measure on [0,1] to [-1,1] by u -> 2u - 1."""
    if mu.domain is not Domain.UNIT:
        raise InvalidInputError("expected a measure on [0,1]")
    support = tuple(2 * u - 1 for u in mu.support)
    return DesignMeasure(Domain.SYMMETRIC, support, mu.weights, mu.mode)
