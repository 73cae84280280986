"""Maximize H_m^(T) over the canonical-moment box and rebuild the design."""

import logging
import math
from collections.abc import Callable, Sequence
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from typing import Any

import numpy as np
from scipy.linalg import eigh_tridiagonal
from scipy.optimize import minimize

from ..config import OBJECTIVE_AGREEMENT_TOL, POLISH_ROUNDS, SolveOptions
from ..errors import (
    DegenerateStepError,
    NoFeasiblePointError,
    NonTerminatingSequenceError,
)
from .canonical import CanonicalSequence, canonical_to_moments, jacobi_coefficients
from .measure import DesignMeasure, Domain
from .oracle import brute_force_search, info_matrix_det, multiset_hankel
from .toda import ModelSpec, evaluate_objective, objective_depth

logger = logging.getLogger(__name__)

Loss = Callable[[np.ndarray], float]


@dataclass
class DesignResult:
    """Optimal canonical moments, the design they describe and its objective value."""

    p_star: CanonicalSequence
    measure: DesignMeasure
    objective: float
    diagnostics: dict[str, Any] = field(default_factory=dict)

    def to_dict(self) -> dict[str, Any]:
        """Convert to the result document."""
        return {
            "design": self.measure.to_dict(),
            "canonical_moments": self.p_star.to_list(),
            "objective": self.objective,
            "diagnostics": self.diagnostics,
        }


@dataclass
class SearchOutcome:
    """Best point of a multistart Nelder-Mead run over [eps, 1 - eps]^dim."""

    x: np.ndarray
    loss: float
    restart_losses: list[float]
    best_restart: int
    iterations: int
    evaluations: int
    restart_points: list[np.ndarray] = field(default_factory=list)

    @property
    def best_so_far(self) -> list[float]:
        """Running minimum of the loss over restarts, in restart order."""
        out, best = [], math.inf
        for value in self.restart_losses:
            best = min(best, value)
            out.append(best)
        return out


def no_prior_pattern(m: int, dim: int) -> list[float]:
    """Canonical moments of the classical D-optimal design, padded with 1/2.

    p_{2j-1} = 1/2 and p_{2j} = (m-j)/(2(m-j)-1), which maximizes the T = empty product.
    """
    pattern = []
    for j in range(1, m):
        a = m - j
        pattern.extend([0.5, a / (2 * a - 1)])
    pattern = pattern[:dim]
    return pattern + [0.5] * (dim - len(pattern))


def restart_starts(
    dim: int, opts: SolveOptions, first_start: Sequence[float] | None = None
) -> list[np.ndarray]:
    """Start points for opts.restarts runs; random ones are uniform on [0.1, 0.9]^dim."""
    rng = np.random.default_rng(opts.seed)
    starts = [rng.uniform(0.1, 0.9, size=dim) for _ in range(opts.restarts)]
    if first_start is not None:
        starts[0] = np.asarray(first_start, dtype=float)
    return starts


def run_restart(
    loss: Loss, x0: np.ndarray, opts: SolveOptions
) -> tuple[np.ndarray, float, int, int]:
    """One bounded Nelder-Mead run, re-polished while it keeps improving."""
    eps = opts.margin
    bounds = [(eps, 1 - eps)] * len(x0)
    x = np.clip(x0, eps, 1 - eps)
    iterations = evaluations = 0
    value = math.inf
    for _ in range(1 + POLISH_ROUNDS):
        res = minimize(
            loss,
            x,
            method="Nelder-Mead",
            bounds=bounds,
            options={
                "maxiter": opts.max_iters,
                "maxfev": 2 * opts.max_iters,
                "xatol": 1e-10,
                "fatol": opts.tol,
                "adaptive": len(x0) > 4,
            },
        )
        iterations += int(res.nit)
        evaluations += int(res.nfev)
        improved = float(res.fun) < value - opts.tol
        if float(res.fun) <= value:
            x, value = np.asarray(res.x, dtype=float), float(res.fun)
        if not improved:
            break
    return x, value, iterations, evaluations


def multistart_minimize(
    loss: Loss,
    dim: int,
    opts: SolveOptions,
    first_start: Sequence[float] | None = None,
    label: str = "search",
) -> SearchOutcome:
    """Nelder-Mead from opts.restarts starts; the lowest restart index wins ties.

    The first start is `first_start` when given; the others are drawn uniformly
    from [0.1, 0.9]^dim with a generator seeded by opts.seed.
    """
    starts = restart_starts(dim, opts, first_start)

    if opts.workers > 1:
        with ThreadPoolExecutor(max_workers=opts.workers) as pool:
            runs = list(pool.map(lambda x0: run_restart(loss, x0, opts), starts))
    else:
        runs = [run_restart(loss, x0, opts) for x0 in starts]

    best = 0
    for i, (_, value, _, _) in enumerate(runs):
        logger.debug(f"{label}: restart {i} loss {value:.15g}")
        if value < runs[best][1]:
            best = i
    x, value, _, _ = runs[best]
    return SearchOutcome(
        x=x,
        loss=value,
        restart_losses=[r[1] for r in runs],
        best_restart=best,
        iterations=sum(r[2] for r in runs),
        evaluations=sum(r[3] for r in runs),
        restart_points=[r[0] for r in runs],
    )


def snap(x: Sequence[float], opts: SolveOptions) -> tuple[CanonicalSequence, list[int], bool]:
    """Snap coordinates near a box face to {0,1} and cut at the first terminal.

    Returns the sequence, the 1-based snapped index (at most one survives the
    cut) and whether a terminal 1 had to be appended because nothing snapped.
    """
    lo = opts.margin + opts.snap_tol
    hi = 1 - opts.margin - opts.snap_tol
    values = []
    for k, v in enumerate(x, start=1):
        if v <= lo:
            return CanonicalSequence(tuple(values), 0.0), [k], False
        if v >= hi:
            return CanonicalSequence(tuple(values), 1.0), [k], False
        values.append(float(v))
    return CanonicalSequence(tuple(values), 1.0), [], True


def determinant_objective(p: CanonicalSequence, spec: ModelSpec) -> float:
    """H_m^(T) as the Hankel determinant of the generalized moments of p."""
    return float(multiset_hankel(canonical_to_moments(p, objective_depth(spec)), spec))


def _relative_gap(a: float, b: float) -> float:
    scale = max(abs(a), abs(b))
    return abs(a - b) / scale if scale > 0 else 0.0


def checked_objective(p: CanonicalSequence, spec: ModelSpec) -> float:
    """H_m^(T) through the Toda chain, cross-checked against the determinant.

    The determinant value wins when the chain degenerates or the two disagree
    by more than OBJECTIVE_AGREEMENT_TOL.
    """
    reference = determinant_objective(p, spec)
    try:
        value = float(evaluate_objective(p, spec))
    except DegenerateStepError:
        return reference
    if _relative_gap(value, reference) > OBJECTIVE_AGREEMENT_TOL:
        logger.warning(f"Toda value {value:.12g} disagrees with determinant {reference:.12g}")
        return reference
    return value


def _as_loss(value: float) -> float:
    if not (value > 0 and math.isfinite(value)):
        return math.inf
    return -math.log(value)


def _objective_loss(spec: ModelSpec) -> Loss:
    def loss(x: np.ndarray) -> float:
        p = CanonicalSequence(tuple(float(v) for v in x))
        try:
            value = float(evaluate_objective(p, spec))
        except DegenerateStepError:
            value = determinant_objective(p, spec)
        return _as_loss(value)

    return loss


def rescore_restarts(outcome: SearchOutcome, spec: ModelSpec) -> tuple[SearchOutcome, list[int]]:
    """Re-evaluate every restart's end point with checked_objective and re-pick the best.

    Returns the updated outcome and the restarts whose score changed.
    """
    losses = list(outcome.restart_losses)
    changed = []
    for i, x in enumerate(outcome.restart_points):
        if not math.isfinite(losses[i]):
            continue
        checked = _as_loss(checked_objective(CanonicalSequence(tuple(float(v) for v in x)), spec))
        if abs(math.expm1(losses[i] - checked)) > OBJECTIVE_AGREEMENT_TOL:
            logger.warning(f"restart {i}: search objective disagrees with the determinant")
            losses[i] = checked
            changed.append(i)
    if not changed:
        return outcome, changed
    best = min(range(len(losses)), key=lambda i: (losses[i], i))
    rescored = replace(
        outcome,
        x=outcome.restart_points[best],
        loss=losses[best],
        restart_losses=losses,
        best_restart=best,
    )
    return rescored, changed


def maximize_objective(spec: ModelSpec, opts: SolveOptions) -> CanonicalSequence:
    """Local maximizer of H_m^(T) over [eps, 1-eps]^(2m-2+2S), snapped and terminated."""
    return _maximize(spec, opts)[0]


def _maximize(
    spec: ModelSpec, opts: SolveOptions
) -> tuple[CanonicalSequence, SearchOutcome, dict]:
    dim = objective_depth(spec)
    if dim == 0:
        # m = 1 without prior: every design is optimal, take the point mass at 1
        p = CanonicalSequence((), 1.0)
        outcome = SearchOutcome(np.zeros(0), 0.0, [0.0], 0, 0, 0)
        return p, outcome, {
            "snapped_indices": [1],
            "appended_terminal": False,
            "rescored_restarts": [],
        }
    outcome = multistart_minimize(
        _objective_loss(spec), dim, opts, no_prior_pattern(spec.m, dim), label="dopt"
    )
    outcome, rescored = rescore_restarts(outcome, spec)
    if not math.isfinite(outcome.loss):
        raise NoFeasiblePointError(
            "every start was degenerate or had a nonpositive objective",
            details={"restarts": opts.restarts, "model": spec.to_dict()},
        )
    p, snapped, appended = snap(outcome.x, opts)
    if appended:
        logger.warning("no canonical moment reached the box boundary; appended terminal 1")
    return p, outcome, {
        "snapped_indices": snapped,
        "appended_terminal": appended,
        "rescored_restarts": rescored,
    }


def reconstruct_design(p: CanonicalSequence) -> DesignMeasure:
    """Support and weights from the Jacobi matrix of a terminating sequence.

    The symmetric tridiagonal matrix has diagonal alpha_k and off-diagonal
    sqrt(beta_k); it is cut at the first vanishing beta. Support points are its
    eigenvalues, weights the squared first components of the eigenvectors.
    """
    if not p.terminates:
        raise NonTerminatingSequenceError(
            "a design can only be rebuilt from a terminating canonical sequence",
            details={"depth": p.depth},
        )
    size = p.depth // 2 + 2
    alphas, betas = jacobi_coefficients(p, size)
    n = next((k for k, b in enumerate(betas, start=1) if b == 0), size)
    diag = np.array([float(a) for a in alphas[:n]])
    off = np.sqrt(np.clip([float(b) for b in betas[: n - 1]], 0.0, None))
    if n == 1:
        nodes, weights = diag, np.ones(1)
    else:
        nodes, vectors = eigh_tridiagonal(diag, off)
        weights = vectors[0, :] ** 2
    keep = weights > 0
    nodes = np.clip(nodes[keep], 0.0, 1.0)
    weights = weights[keep] / weights[keep].sum()
    return DesignMeasure(Domain.UNIT, tuple(nodes.tolist()), tuple(weights.tolist()))


def solve(spec: ModelSpec, opts: SolveOptions | None = None) -> DesignResult:
    """D-optimal design for PRM_m(beta, b)."""
    opts = opts or SolveOptions()
    logger.info(f"solving {spec.to_dict()} with {opts.restarts} restart(s)")
    p, outcome, snapping = _maximize(spec, opts)
    objective = checked_objective(p, spec)
    measure = reconstruct_design(p)
    diagnostics: dict[str, Any] = {
        "iterations": outcome.iterations,
        "evaluations": outcome.evaluations,
        "restarts": opts.restarts,
        "best_restart": outcome.best_restart,
        "restart_objectives": [_from_loss(v) for v in outcome.restart_losses],
        "best_so_far": [_from_loss(v) for v in outcome.best_so_far],
        "box_dimension": objective_depth(spec),
        "info_matrix_det": float(info_matrix_det(measure, spec)),
        **snapping,
    }
    if opts.oracle_gap:
        reference = brute_force_search(spec, opts.grid_size)
        diagnostics["oracle_objective"] = reference.determinant
        diagnostics["oracle_gap"] = (reference.determinant - objective) / reference.determinant
    logger.info(f"objective {objective:.12g} on {len(measure)} support point(s)")
    return DesignResult(p, measure, objective, diagnostics)


def _from_loss(loss: float) -> float | None:
    return math.exp(-loss) if math.isfinite(loss) else None
