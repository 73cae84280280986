"""Determinant ground truth and brute-force design search.

Everything here is slow and direct: generalized Hankel
determinants from generalized moments, the determinant forms of zeta^(T,s) and
p^(T), weighted information matrices, and a grid exchange search for the
relaxed D-optimal problem. These are the references the Toda pipeline and the
optimizer are checked against.
"""

import logging
from collections.abc import Sequence
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import product
from typing import Any

import numpy as np

from ..config import (
    DEFAULT_GRID_SIZE,
    DETERMINANT_TOL,
    WEIGHT_UPDATE_MAX_ITERS,
    WEIGHT_UPDATE_TOL,
)
from ..errors import (
    InsufficientMomentsError,
    InvalidInputError,
    SingularInformationMatrixError,
    ZeroDenominatorError,
)
from ..numeric import Mode, Number, coerce, det, is_zero
from .measure import DesignMeasure, Domain, MomentSequence
from .toda import ModelSpec, PriorMultiset, ZetaTable, gen_moments, multiset_from_model

logger = logging.getLogger(__name__)

# Exchange rounds before the search gives up improving
MAX_EXCHANGE_ROUNDS = 500
# Weights below this are dropped from the returned design
MIN_WEIGHT = 1e-6


@dataclass(frozen=True)
class GenHankelSpec:
    """H_k^(T + extra): size k, stage T, optional augmentation such as {0}, {1} or {0, s}."""

    T: PriorMultiset
    k: int
    extra: tuple[Number, ...] = ()

    def __post_init__(self):
        if self.k < 0:
            raise InvalidInputError(f"Hankel size must be nonnegative, got {self.k}")

    @property
    def stage(self) -> PriorMultiset:
        return self.T.union(self.extra) if self.extra else self.T


def _moment_values(c: MomentSequence | Sequence[Number]) -> tuple[tuple[Number, ...], Mode]:
    if isinstance(c, MomentSequence):
        return c.values, c.mode
    values = tuple(c)
    return values, Mode.infer(values)


def gen_hankel(c: MomentSequence | Sequence[Number], spec: GenHankelSpec) -> Number:
    """det (c_{i+j}^(T))_{i,j<k}; H_0 = 1."""
    values, mode = _moment_values(c)
    if spec.k == 0:
        return coerce(1, mode)
    stage = spec.stage
    needed = 2 * spec.k - 1 + stage.size
    if len(values) < needed:
        raise InsufficientMomentsError(
            f"H_{spec.k} at |T| = {stage.size} needs c_0..c_{needed - 1}",
            details={"k": spec.k, "multiset_size": stage.size, "available": len(values)},
        )
    gm = gen_moments(values, stage)
    k = spec.k
    return det([[gm[i + j] for j in range(k)] for i in range(k)], mode)


def _ratio(num: Number, den: Number, mode: Mode, what: str) -> Number:
    if is_zero(den, mode, DETERMINANT_TOL):
        raise ZeroDenominatorError(f"vanishing denominator for {what}")
    return num / den


def gen_zeta_det(
    c: MomentSequence | Sequence[Number], T: PriorMultiset, s: Number, k: int
) -> Number:
    """zeta_k^(T,s) from its determinant form.

    zeta_{2j}^(T,s)   = H_{j+1}^T H_{j-1}^{T+s} / (H_j^{T+s} H_j^T)
    zeta_{2j+1}^(T,s) = H_{j+1}^{T+s} H_j^T / (H_{j+1}^T H_j^{T+s})
    """
    values, mode = _moment_values(c)
    s = coerce(s, mode)
    if k == 0:
        return coerce(0, mode)

    def h(size: int, shifted: bool) -> Number:
        return gen_hankel(values, GenHankelSpec(T, size, (s,) if shifted else ()))

    j, odd = divmod(k, 2)
    if odd:
        num = h(j + 1, True) * h(j, False)
        den = h(j + 1, False) * h(j, True)
    else:
        num = h(j + 1, False) * h(j - 1, True)
        den = h(j, True) * h(j, False)
    return _ratio(num, den, mode, f"zeta_{k}^(T,{s})")


def gen_canonical_det(c: MomentSequence | Sequence[Number], T: PriorMultiset, k: int) -> Number:
    """Signed generalized canonical moment p_k^(T).

    p_{2j}^(T)   = -H_{j+1}^T H_{j-1}^{T+{0,1}} / (H_j^{T+{0}} H_j^{T+{1}})
    p_{2j+1}^(T) =  H_{j+1}^{T+{0}} H_j^{T+{1}} / (H_{j+1}^T H_j^{T+{0,1}})

    At T = empty these are the ordinary canonical moments.
    """
    values, mode = _moment_values(c)
    zero, one = coerce(0, mode), coerce(1, mode)
    if k < 1:
        raise InvalidInputError(f"canonical index must be >= 1, got {k}")

    def h(size: int, *extra: Number) -> Number:
        return gen_hankel(values, GenHankelSpec(T, size, extra))

    j, odd = divmod(k, 2)
    if odd:
        num = h(j + 1, zero) * h(j, one)
        den = h(j + 1) * h(j, zero, one)
        return _ratio(num, den, mode, f"p_{k}^(T)")
    num = h(j + 1) * h(j - 1, zero, one)
    den = h(j, zero) * h(j, one)
    return -_ratio(num, den, mode, f"p_{k}^(T)")


def gen_zeta_table(
    c: MomentSequence | Sequence[Number], T: PriorMultiset, s: Number, K: int
) -> ZetaTable:
    """ZetaTable at (T, s) with zeta_1..zeta_K computed from determinants."""
    values, mode = _moment_values(c)
    zetas = tuple(gen_zeta_det(values, T, s, k) for k in range(1, K + 1))
    c0 = gen_moments(values, T)[0]
    return ZetaTable(T, coerce(s, mode), zetas, c0, mode)


def basis_vector(x: Number, spec: ModelSpec) -> list[Number]:
    """f(x) = prod_j (x - beta_j)^{b_j} (1, x, ..., x^{m-1})."""
    weight = x * 0 + 1
    for beta, b in zip(spec.beta, spec.b):
        weight *= (x - beta) ** b
    return [weight * x**i for i in range(spec.m)]


def info_matrix(mu: DesignMeasure, spec: ModelSpec) -> list[list[Number]]:
    """M(mu) = sum_i w_i f(x_i) f(x_i)^T."""
    m = spec.m
    zero = coerce(0, mu.mode)
    rows = [[zero] * m for _ in range(m)]
    beta_spec = ModelSpec(m, tuple(coerce(b, mu.mode) for b in spec.beta), spec.b)
    for x, w in mu.atoms:
        f = basis_vector(x, beta_spec)
        for i in range(m):
            for j in range(m):
                rows[i][j] += w * f[i] * f[j]
    return rows


def info_matrix_det(mu: DesignMeasure, spec: ModelSpec) -> Number:
    """det M(mu); equals gen_hankel(moments(mu), T, m) with T = multiset_from_model(spec)."""
    return det(info_matrix(mu, spec), mu.mode)


@dataclass
class ExchangeResult:
    """Outcome of the grid exchange search."""

    measure: DesignMeasure
    determinant: float
    history: list[float] = field(default_factory=list)
    exchanges: int = 0
    weight_iterations: int = 0

    def to_dict(self) -> dict[str, Any]:
        return {
            "design": self.measure.to_dict(),
            "objective": self.determinant,
            "diagnostics": {
                "history": self.history,
                "exchanges": self.exchanges,
                "weight_iterations": self.weight_iterations,
            },
        }


def _features(grid: np.ndarray, spec: ModelSpec) -> np.ndarray:
    weight = np.ones_like(grid)
    for beta, b in zip(spec.beta, spec.b):
        weight *= (grid - float(beta)) ** b
    return weight[:, None] * grid[:, None] ** np.arange(spec.m)[None, :]


def _information(F: np.ndarray, idx: np.ndarray, w: np.ndarray) -> np.ndarray:
    rows = F[idx]
    return rows.T @ (w[:, None] * rows)


def _optimize_weights(
    F: np.ndarray, idx: np.ndarray, w: np.ndarray, m: int
) -> tuple[np.ndarray, int]:
    """Multiplicative update w_i <- w_i f_i^T M^-1 f_i / m until det stalls."""
    current = np.linalg.det(_information(F, idx, w))
    for it in range(1, WEIGHT_UPDATE_MAX_ITERS + 1):
        M = _information(F, idx, w)
        rows = F[idx]
        d = np.einsum("ij,jk,ik->i", rows, np.linalg.inv(M), rows)
        w = w * d / m
        w = w / w.sum()
        new = np.linalg.det(_information(F, idx, w))
        if abs(new - current) <= WEIGHT_UPDATE_TOL * abs(current):
            return w, it
        current = new
    return w, WEIGHT_UPDATE_MAX_ITERS


def _starting_support(F: np.ndarray, count: int) -> np.ndarray:
    n = len(F)
    base = np.round(np.linspace(0, n - 1, count)).astype(int)
    w = np.full(count, 1.0 / count)
    for offset in range(n):
        idx = np.unique((base + offset) % n)
        if len(idx) < count:
            continue
        if np.linalg.det(_information(F, idx, w)) > DETERMINANT_TOL:
            return idx
    raise SingularInformationMatrixError(
        "no nonsingular equispaced start on the grid",
        details={"grid_size": n, "support_count": count},
    )


def brute_force_search(
    spec: ModelSpec,
    grid_size: int = DEFAULT_GRID_SIZE,
    support_count: int | None = None,
) -> ExchangeResult:
    """Exchange search on a uniform grid of [0,1].

    Alternates multiplicative weight optimization with the best single-point
    exchange of a support point for a grid point, until no exchange improves
    the determinant.
    """
    m = spec.m
    support_count = support_count or m
    if not grid_size >= support_count >= m:
        raise InvalidInputError(
            "need grid_size >= support_count >= m",
            details={"grid_size": grid_size, "support_count": support_count, "m": m},
        )
    grid = np.linspace(0.0, 1.0, grid_size)
    F = _features(grid, spec)

    idx = _starting_support(F, support_count)
    w = np.full(support_count, 1.0 / support_count)
    w, iters = _optimize_weights(F, idx, w, m)
    best = float(np.linalg.det(_information(F, idx, w)))
    history = [best]
    weight_iterations = iters
    exchanges = 0

    for _ in range(MAX_EXCHANGE_ROUNDS):
        M = _information(F, idx, w)
        candidate = None
        for i in range(support_count):
            fi = F[idx[i]]
            base = M - w[i] * np.outer(fi, fi)
            trial = base[None, :, :] + w[i] * np.einsum("gi,gj->gij", F, F)
            dets = np.linalg.det(trial)
            dets[idx] = -np.inf
            g = int(np.argmax(dets))
            if dets[g] > best * (1 + WEIGHT_UPDATE_TOL) and (
                candidate is None or dets[g] > candidate[2]
            ):
                candidate = (i, g, float(dets[g]))
        if candidate is None:
            break
        i, g, _ = candidate
        idx = idx.copy()
        idx[i] = g
        exchanges += 1
        w, iters = _optimize_weights(F, idx, w, m)
        weight_iterations += iters
        best = float(np.linalg.det(_information(F, idx, w)))
        history.append(best)
        logger.debug(f"exchange {exchanges}: det {best:.12g}")

    keep = w > MIN_WEIGHT
    support = grid[idx][keep]
    weights = w[keep] / w[keep].sum()
    measure = DesignMeasure(Domain.UNIT, tuple(support.tolist()), tuple(weights.tolist()))
    logger.info(f"exchange search: det {best:.12g} after {exchanges} exchange(s)")
    return ExchangeResult(measure, best, history, exchanges, weight_iterations)


def brute_force_design(
    spec: ModelSpec,
    grid_size: int = DEFAULT_GRID_SIZE,
    support_count: int | None = None,
) -> DesignMeasure:
    """Best design found by the grid exchange search."""
    return brute_force_search(spec, grid_size, support_count).measure


def sign_pattern_sup(xi: DesignMeasure, m: int, alpha: int) -> Number:
    """sup over |psi| <= |x|^alpha of r(psi)^T B^-1 r(psi) for a finite design.

    The quadratic form is convex in (psi(x_i)), so the sup is attained at
    psi(x_i) = +-|x_i|^alpha; every sign pattern is enumerated.
    """
    mode = xi.mode
    B = [[sum(w * x ** (i + j) for x, w in xi.atoms) for j in range(m)] for i in range(m)]
    if mode is Mode.RATIONAL:
        Binv = _rational_inverse(B)
    else:
        Binv = np.linalg.inv(np.asarray(B, dtype=float)).tolist()
    best: Number = coerce(0, mode)
    for signs in product((1, -1), repeat=len(xi)):
        r = [
            sum(s * w * x ** (i + m) * abs(x) ** alpha for s, (x, w) in zip(signs, xi.atoms))
            for i in range(m)
        ]
        value = sum(r[i] * Binv[i][j] * r[j] for i in range(m) for j in range(m))
        if value > best:
            best = value
    return best


def _rational_inverse(rows: list[list[Fraction]]) -> list[list[Fraction]]:
    """Gauss-Jordan inverse over the rationals."""
    n = len(rows)
    a = [[Fraction(x) for x in row] + [Fraction(int(i == j)) for j in range(n)]
         for i, row in enumerate(rows)]
    for col in range(n):
        pivot = next((r for r in range(col, n) if a[r][col] != 0), None)
        if pivot is None:
            raise SingularInformationMatrixError("information matrix is singular")
        a[col], a[pivot] = a[pivot], a[col]
        lead = a[col][col]
        a[col] = [x / lead for x in a[col]]
        for r in range(n):
            if r != col and a[r][col] != 0:
                factor = a[r][col]
                a[r] = [x - factor * y for x, y in zip(a[r], a[col])]
    return [row[n:] for row in a]


def multiset_hankel(c: MomentSequence, spec: ModelSpec) -> Number:
    """H_m^(T) of c for the model's multiset, straight from the determinant."""
    return gen_hankel(c, GenHankelSpec(multiset_from_model(spec), spec.m))
