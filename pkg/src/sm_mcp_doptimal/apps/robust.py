"""Robust D-optimal designs for approximate polynomial regression with prior information.

The regression function is a polynomial plus a contamination term x^m psi(x)
with |psi(x)| <= |x|^alpha. Designs are symmetric measures xi on [-1,1]; they
are parameterized by the canonical moments q of mu on [0,1], where
mu([0, x^2]) = xi([-x, x]). The canonical moments of (xi + 1)/2 are then
(1/2, q_1, 1/2, q_2, ...).
"""

import logging
import math
import threading
from collections.abc import Sequence
from dataclasses import dataclass
from typing import Any, Self

import numpy as np

from ..config import PENALTY_ESCALATION, PENALTY_FACTOR, SolveOptions
from ..design.canonical import CanonicalSequence
from ..design.measure import DesignMeasure, Domain, symmetrize
from ..design.optimize import DesignResult, reconstruct_design, restart_starts, run_restart, snap
from ..design.toda import PriorMultiset, hankel_via_toda, zeta_chain
from ..errors import (
    DegenerateStepError,
    InfeasibleBudgetError,
    InsufficientDepthError,
    InvalidInputError,
)
from ..numeric import Mode, Number, coerce, coerce_all, det, to_json

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class RobustSpec:
    """m protected parameters, contamination |x|^alpha, bias budget d, prior roots +-beta_j."""

    m: int
    alpha: int
    d: float
    beta: tuple[Number, ...] = ()
    b: tuple[int, ...] = ()

    def __post_init__(self):
        if isinstance(self.m, bool) or not isinstance(self.m, int) or self.m < 1:
            raise InvalidInputError(f"m must be a positive integer, got {self.m!r}")
        if isinstance(self.alpha, bool) or not isinstance(self.alpha, int) or self.alpha < 0:
            raise InvalidInputError(f"alpha must be a nonnegative integer, got {self.alpha!r}")
        if not self.d > 0:
            raise InvalidInputError(f"bias budget d must be positive, got {self.d!r}")
        beta, b = tuple(self.beta), tuple(self.b)
        if len(beta) != len(b):
            raise InvalidInputError("beta and b differ in length")
        if any(x < 0 for x in beta):
            raise InvalidInputError("prior roots are given by their nonnegative representative")
        if len(set(beta)) != len(beta):
            raise InvalidInputError("beta entries must be pairwise distinct")
        if any(isinstance(x, bool) or not isinstance(x, int) or x < 1 for x in b):
            raise InvalidInputError("b entries must be positive integers")
        object.__setattr__(self, "beta", beta)
        object.__setattr__(self, "b", b)

    @property
    def S(self) -> int:
        return sum(self.b)

    def symmetric_multiset(self) -> PriorMultiset:
        """T' on [-1,1]: +beta_j and -beta_j, each with multiplicity 2 b_j."""
        entries = []
        for beta, b in zip(self.beta, self.b):
            entries.append((beta, 2 * b))
            entries.append((-beta, 2 * b))
        return PriorMultiset(tuple(entries))

    def squared_multiset(self) -> PriorMultiset:
        """T on the mu side: beta_j^2 with multiplicity 2 b_j."""
        return PriorMultiset(tuple((beta * beta, 2 * b) for beta, b in zip(self.beta, self.b)))

    def transported_multiset(self) -> PriorMultiset:
        """T' moved to [0,1] by x -> (x+1)/2."""
        return PriorMultiset(
            tuple(((1 + lam) / 2, mult) for lam, mult in self.symmetric_multiset().entries)
        )

    @property
    def summation_range(self) -> range:
        """i = floor(alpha/2)+1 .. floor((m+alpha)/2)."""
        return range(self.alpha // 2 + 1, (self.m + self.alpha) // 2 + 1)

    def objective_depth(self) -> int:
        """Depth of q read by H_m^(T')(xi): m - 1 + 2S."""
        return self.m - 1 + 2 * self.S

    def constraint_depth(self) -> int:
        """Depth of q read by the bias constraint: m + alpha - 1 + 2S."""
        if not self.summation_range:
            return 0
        return self.m + self.alpha - 1 + 2 * self.S

    def to_dict(self) -> dict[str, Any]:
        return {
            "m": self.m,
            "alpha": self.alpha,
            "d": self.d,
            "beta": [to_json(x) for x in self.beta],
            "b": list(self.b),
        }

    @classmethod
    def from_dict(cls, data: dict[str, Any], mode: Mode = Mode.FLOAT) -> Self:
        missing = [key for key in ("m", "alpha", "d") if key not in data]
        if missing:
            raise InvalidInputError(f"robust spec is missing field(s): {', '.join(missing)}")
        return cls(
            m=data["m"],
            alpha=data["alpha"],
            d=float(data["d"]),
            beta=coerce_all(data.get("beta", []), mode),
            b=tuple(data.get("b", [])),
        )


def s_table(zetas: Sequence[Number], i_max: int, j_max: int) -> list[list[Number]]:
    """S_{i,j} for i <= i_max, j <= j_max, built row by row.

    S_{i,j} = 0 for j < i, S_{0,j} = 1, S_{i,j} = S_{i,j-1} + zeta_{j-i+1} S_{i-1,j}.
    """
    one = zetas[0] * 0 + 1 if zetas else 1
    zero = one * 0
    table = [[one] * (j_max + 1)]
    for i in range(1, i_max + 1):
        row = [zero] * (j_max + 1)
        for j in range(i, j_max + 1):
            index = j - i + 1
            if index > len(zetas):
                raise InsufficientDepthError(
                    f"S_{i},{j} needs zeta_{index}, have {len(zetas)}",
                    details={"i": i, "j": j, "depth": len(zetas)},
                )
            row[j] = row[j - 1] + zetas[index - 1] * table[i - 1][j]
        table.append(row)
    return table


def s_recursion(zetas: Sequence[Number], i: int, j: int) -> Number:
    """S_{i,j} of a zeta sequence (ordinary or generalized)."""
    if i < 0 or j < 0:
        raise InvalidInputError(f"S indices must be nonnegative, got ({i}, {j})")
    if j < i:
        return zetas[0] * 0 if zetas else 0
    return s_table(zetas, i, j)[i][j]


def symmetric_canonical(q: CanonicalSequence) -> CanonicalSequence:
    """Canonical moments of (xi+1)/2 from those of mu."""
    half = coerce(1, q.mode) / 2
    values: list[Number] = []
    for v in q.interior:
        values.extend([half, v])
    if q.terminal is None:
        return CanonicalSequence(tuple(values), None, q.mode)
    values.append(half)
    return CanonicalSequence(tuple(values), q.terminal, q.mode)


def symmetric_objective(q: CanonicalSequence, spec: RobustSpec) -> Number:
    """H_m^(T')(xi) for the symmetric xi whose folded measure has canonical moments q."""
    p = symmetric_canonical(q)
    T = spec.transported_multiset()
    exponent = spec.m * (spec.m - 1) + spec.m * T.size
    return hankel_via_toda(p, T, spec.m) * 2**exponent


def robust_constraint(q: CanonicalSequence, spec: RobustSpec) -> Number:
    """(c_0^(T))^-1 sum_i S_{i,m+alpha-i}^(T)^2 prod_{j <= m+alpha-2i} zeta_j^(T,0).

    q are the canonical moments of mu on [0,1]; T = {beta_j^2 -> 2 b_j}.
    An empty summation range gives 0.
    """
    zero = coerce(0, q.mode)
    rng = spec.summation_range
    if not rng:
        return zero
    length = spec.m + spec.alpha - 1
    table = zeta_chain(q, spec.squared_multiset(), length)
    zetas, c0 = table.zetas, table.c0
    S = s_table(zetas, rng.stop - 1, spec.m + spec.alpha - 1)
    if c0 == 0:
        raise DegenerateStepError("c_0^(T) vanishes for this design")
    total = zero
    for i in rng:
        term = S[i][spec.m + spec.alpha - i] ** 2
        for j in range(1, spec.m + spec.alpha - 2 * i + 1):
            term *= zetas[j - 1]
        total += term
    return total / c0


def polynomial_bias(xi: DesignMeasure, spec: RobustSpec) -> Number:
    """r^T B^-1 r / (c_0^(T'))^2 at psi(x) = x^alpha, computed from xi's atoms.

    r = int f(x) x^(m+alpha) w(x) dxi and B = int f f^T w dxi with
    f = (1, x, ..., x^(m-1)) and w(x) = prod_j (x^2 - beta_j^2)^(2 b_j).
    For symmetric xi this equals robust_constraint of the folded measure.
    """
    if xi.domain is not Domain.SYMMETRIC:
        raise InvalidInputError("polynomial_bias expects a measure on [-1,1]")
    mode = xi.mode
    m, top = spec.m, spec.m + spec.alpha
    betas = [coerce(x, mode) for x in spec.beta]

    def weight(x: Number) -> Number:
        w = coerce(1, mode)
        for beta, b in zip(betas, spec.b):
            w *= (x * x - beta * beta) ** (2 * b)
        return w

    atoms = [(x, w * weight(x)) for x, w in xi.atoms]
    c0 = sum((w for _, w in atoms), start=coerce(0, mode))
    B = [[sum(w * x ** (i + j) for x, w in atoms) for j in range(m)] for i in range(m)]
    r = [sum(w * x ** (i + top) for x, w in atoms) for i in range(m)]
    if mode is Mode.RATIONAL:
        # r^T B^-1 r = -det([[B, r], [r^T, 0]]) / det B
        bordered = [row + [r[i]] for i, row in enumerate(B)] + [r + [coerce(0, mode)]]
        value = -det(bordered, mode) / det(B, mode)
    else:
        value = float(np.asarray(r) @ np.linalg.solve(np.asarray(B, float), np.asarray(r)))
    return value / (c0 * c0)


class _FeasibleTracker:
    """Best feasible evaluation seen across every restart."""

    def __init__(self):
        self._lock = threading.Lock()
        self.loss = math.inf
        self.x: np.ndarray | None = None
        self.evaluations = 0
        self.feasible = 0

    def offer(self, x: np.ndarray, loss: float, feasible: bool) -> None:
        with self._lock:
            self.evaluations += 1
            if feasible:
                self.feasible += 1
                if loss < self.loss:
                    self.loss, self.x = loss, np.array(x, dtype=float)


def _penalized_loss(spec: RobustSpec, factor: float, tracker: _FeasibleTracker):
    def loss(x: np.ndarray) -> float:
        q = CanonicalSequence(tuple(float(v) for v in x))
        try:
            h = float(symmetric_objective(q, spec))
            g = float(robust_constraint(q, spec))
        except DegenerateStepError:
            return math.inf
        if not (h > 0 and math.isfinite(h) and math.isfinite(g)):
            return math.inf
        objective = -math.log(h)
        tracker.offer(x, objective, g <= spec.d)
        excess = max(0.0, g - spec.d) / spec.d
        return objective + factor * excess * excess

    return loss


def _terminate(
    x: np.ndarray, spec: RobustSpec, opts: SolveOptions
) -> tuple[CanonicalSequence, bool]:
    """Snapped sequence if it stays within budget, else x with a terminal 1 appended."""
    q, _, appended = snap(x, opts)
    if not appended:
        try:
            if float(robust_constraint(q, spec)) <= spec.d:
                return q, False
        except DegenerateStepError:
            pass
    return CanonicalSequence(tuple(float(v) for v in x), 1.0), True


def solve_robust(spec: RobustSpec, opts: SolveOptions | None = None) -> DesignResult:
    """Maximize H_m^(T')(xi) over symmetric xi subject to the bias budget d.

    The budget enters as the penalty factor * (max(0, g - d)/d)^2 on -log H;
    the factor grows by PENALTY_ESCALATION with each restart. The returned
    point is the best feasible evaluation over all restarts.
    """
    opts = opts or SolveOptions()
    dim = max(spec.objective_depth(), spec.constraint_depth(), 1)
    logger.info(f"robust solve {spec.to_dict()} over {dim} canonical moment(s)")

    tracker = _FeasibleTracker()
    first = [0.5] * dim
    iterations = 0
    factors = []
    for r, x0 in enumerate(restart_starts(dim, opts, first)):
        factor = PENALTY_FACTOR * PENALTY_ESCALATION**r
        factors.append(factor)
        _, value, nit, _ = run_restart(_penalized_loss(spec, factor, tracker), x0, opts)
        iterations += nit
        logger.debug(f"robust restart {r}: penalized loss {value:.12g}")

    if tracker.x is None:
        logger.warning(f"no design met the bias budget d = {spec.d}")
        raise InfeasibleBudgetError(
            "no start satisfied the bias budget",
            details={"d": spec.d, "restarts": opts.restarts, "evaluations": tracker.evaluations},
        )

    q, appended = _terminate(tracker.x, spec, opts)
    xi = symmetrize(reconstruct_design(q))
    objective = float(symmetric_objective(q, spec))
    constraint = float(robust_constraint(q, spec))
    diagnostics = {
        "constraint": constraint,
        "budget": spec.d,
        "mu_canonical_moments": q.to_list(),
        "penalty_factors": factors,
        "iterations": iterations,
        "evaluations": tracker.evaluations,
        "feasible_evaluations": tracker.feasible,
        "appended_terminal": appended,
    }
    logger.info(f"robust objective {objective:.12g}, constraint {constraint:.6g} <= {spec.d}")
    return DesignResult(symmetric_canonical(q), xi, objective, diagnostics)
