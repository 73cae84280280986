"""Canonical-moment calculus on [0,1].

Hankel determinants, the maps moments <-> canonical moments <-> zeta, and the
product formula for H_m^(0). Every function works in both numeric backends;
the backend is carried by the input values.
"""

from collections.abc import Sequence
from dataclasses import dataclass
from fractions import Fraction
from typing import Any, Self

import numpy as np

from ..config import (
    DETERMINANT_TOL,
    INTERIOR_MARGIN,
    LANCZOS_TOL,
    MOMENT_REJECT_TOL,
    TERMINAL_TOL,
    ZETA_TOL,
)
from ..errors import (
    BoundaryMomentPointError,
    InsufficientDepthError,
    InsufficientMomentsError,
    InvalidInputError,
    InvalidMomentSequenceError,
    InvalidZetaError,
    ZeroDenominatorError,
)
from ..numeric import Mode, Number, coerce, coerce_all, det, is_zero, to_json
from .measure import DesignMeasure, Domain, MomentSequence, moments


@dataclass(frozen=True)
class CanonicalSequence:
    """Canonical moments p_1..p_{N-1} in (0,1) and an optional terminal p_N in {0,1}."""

    interior: tuple[Number, ...]
    terminal: Number | None = None
    mode: Mode = Mode.FLOAT

    def __post_init__(self):
        interior = coerce_all(self.interior, self.mode)
        margin = 0 if self.mode is Mode.RATIONAL else INTERIOR_MARGIN
        for k, p in enumerate(interior, start=1):
            if not margin < p < 1 - margin:
                raise InvalidInputError(f"p_{k} = {p} is not strictly inside (0,1)")
        terminal = self.terminal
        if terminal is not None:
            terminal = coerce(terminal, self.mode)
            if terminal not in (0, 1):
                raise InvalidInputError(f"terminal value must be 0 or 1, got {terminal}")
        object.__setattr__(self, "interior", interior)
        object.__setattr__(self, "terminal", terminal)

    @property
    def values(self) -> tuple[Number, ...]:
        """p_1..p_N including the terminal value."""
        if self.terminal is None:
            return self.interior
        return (*self.interior, self.terminal)

    @property
    def depth(self) -> int:
        return len(self.values)

    @property
    def terminates(self) -> bool:
        return self.terminal is not None

    def __len__(self) -> int:
        return self.depth

    def to_list(self) -> list[float | str]:
        return [to_json(p) for p in self.values]

    @classmethod
    def from_values(cls, values: Sequence[object], mode: Mode | None = None) -> Self:
        """Build from p_1..p_N; only the last entry may be terminal.

        In float mode a last entry within TERMINAL_TOL of {0,1} is snapped.
        """
        values = list(values)
        mode = mode or Mode.infer(values)
        ps = list(coerce_all(values, mode))
        if not ps:
            return cls((), None, mode)
        last = ps[-1]
        terminal = _as_terminal(last, mode)
        if terminal is not None:
            return cls(tuple(ps[:-1]), terminal, mode)
        return cls(tuple(ps), None, mode)

    @classmethod
    def truncated(cls, values: Sequence[object], mode: Mode | None = None) -> Self:
        """Build from values, cutting the sequence at its first terminal entry."""
        values = list(values)
        mode = mode or Mode.infer(values)
        ps = list(coerce_all(values, mode))
        for k, p in enumerate(ps):
            terminal = _as_terminal(p, mode)
            if terminal is not None:
                return cls(tuple(ps[:k]), terminal, mode)
        return cls(tuple(ps), None, mode)

    def padded(self, n: int, fill: Number = 0.5) -> tuple[Number, ...]:
        """p_1..p_n, filling beyond termination with an arbitrary interior value."""
        vals = self.values
        if n <= len(vals):
            return vals[:n]
        if not self.terminates:
            raise InsufficientDepthError(
                f"canonical depth {len(vals)} < required {n}",
                details={"depth": len(vals), "required": n},
            )
        return (*vals, *([coerce(fill, self.mode)] * (n - len(vals))))


def _as_terminal(p: Number, mode: Mode) -> Number | None:
    if mode is Mode.RATIONAL:
        return p if p in (0, 1) else None
    if p <= TERMINAL_TOL:
        return 0.0
    if p >= 1 - TERMINAL_TOL:
        return 1.0
    return None


@dataclass(frozen=True)
class ZetaSequence:
    """zeta_1..zeta_K (zeta_0 = 0 is implicit)."""

    values: tuple[Number, ...]
    mode: Mode = Mode.FLOAT

    def __len__(self) -> int:
        return len(self.values)

    def __getitem__(self, k: int) -> Number:
        return self.values[k]

    def to_list(self) -> list[float | str]:
        return [to_json(z) for z in self.values]


def _unpack(c: MomentSequence | Sequence[Number]) -> tuple[tuple[Number, ...], Mode]:
    if isinstance(c, MomentSequence):
        return c.values, c.mode
    values = tuple(c)
    return values, Mode.infer(values)


def hankel(
    c: MomentSequence | Sequence[Number], k: int, n: int = 0, barred: bool = False
) -> Number:
    """H_k^(n) = |c_{i+j+n}| or, barred, |c_{i+j+n} - c_{i+j+n+1}|.

    H_0^(n) = 1 and H_k^(n) = 0 for negative k.
    """
    values, mode = _unpack(c)
    one = Fraction(1) if mode is Mode.RATIONAL else 1.0
    if k < 0:
        return one * 0
    if k == 0:
        return one
    top = 2 * k - 2 + n + (1 if barred else 0)
    if top >= len(values):
        raise InsufficientMomentsError(
            f"H_{k}^({n}) needs moments up to c_{top}, have c_0..c_{len(values) - 1}",
            details={"k": k, "n": n, "barred": barred, "available": len(values)},
        )
    if barred:
        rows = [[values[i + j + n] - values[i + j + n + 1] for j in range(k)] for i in range(k)]
    else:
        rows = [[values[i + j + n] for j in range(k)] for i in range(k)]
    return det(rows, mode)


def check_moment_space(c: MomentSequence, tol: float = DETERMINANT_TOL) -> bool:
    """True when every Hankel determinant that fits in c is nonnegative."""
    values, mode = _unpack(c)
    K = len(values) - 1
    for n in (0, 1):
        for barred in (False, True):
            k = 1
            while 2 * k - 2 + n + (1 if barred else 0) <= K:
                h = hankel(values, k, n, barred)
                if (mode is Mode.RATIONAL and h < 0) or (mode is Mode.FLOAT and h < -tol):
                    return False
                k += 1
    return True


def _bound_determinants(k: int) -> tuple[tuple[int, int, bool], tuple[int, int, bool]]:
    """(size, shift, barred) of the determinants that vanish at c_k^- and c_k^+."""
    j, odd = divmod(k, 2)
    if odd:
        return (j + 1, 1, False), (j + 1, 0, True)
    return (j + 1, 0, False), (j, 1, True)


def moment_bounds(c: MomentSequence | Sequence[Number], k: int) -> tuple[Number, Number]:
    """Extremal k-th moments (c_k^-, c_k^+) given c_0..c_{k-1} on [0,1].

    Each bound is the root of a Hankel determinant that is linear in its corner
    entry c_k; the slope is the leading minor (negated for barred forms).
    """
    values, mode = _unpack(c)
    if k < 1:
        raise InvalidInputError(f"moment index must be >= 1, got {k}")
    if len(values) < k:
        raise InsufficientMomentsError(
            f"moment_bounds({k}) needs c_0..c_{k - 1}",
            details={"k": k, "available": len(values)},
        )
    zero = values[0] * 0
    padded = list(values[:k]) + [zero]
    bounds = []
    for size, shift, barred in _bound_determinants(k):
        f0 = hankel(padded, size, shift, barred)
        minor = hankel(padded, size - 1, shift, barred)
        slope = -minor if barred else minor
        if is_zero(slope, mode, DETERMINANT_TOL):
            raise BoundaryMomentPointError(
                f"c_0..c_{k - 1} lie on the moment-space boundary",
                details={"k": k},
            )
        bounds.append(-f0 / slope)
    lower, upper = bounds
    return lower, upper


def _unit_clamped(p: Number, k: int, mode: Mode) -> Number:
    """Reject p_k outside [0,1]; float values within MOMENT_REJECT_TOL are clamped."""
    tol = 0 if mode is Mode.RATIONAL else MOMENT_REJECT_TOL
    if p < -tol or p > 1 + tol:
        raise InvalidMomentSequenceError(f"p_{k} = {p} outside [0,1]", details={"k": k})
    if mode is Mode.FLOAT:
        return min(max(p, 0.0), 1.0)
    return p


def moments_to_canonical(c: MomentSequence) -> CanonicalSequence:
    """p_k = (c_k - c_k^-)/(c_k^+ - c_k^-) until termination or moment exhaustion.

    Exact input is first checked against every Hankel determinant. In float mode
    the Hankel determinants lose accuracy quickly with depth; measures with known
    atoms should go through measure_to_canonical instead.
    """
    values, mode = _unpack(c)
    if isinstance(c, MomentSequence) and c.domain is not Domain.UNIT:
        raise InvalidInputError("canonical moments are defined here for measures on [0,1]")
    if mode is Mode.RATIONAL and not check_moment_space(values):
        raise InvalidMomentSequenceError(
            "moments lie outside the moment space of [0,1]", details={"order": len(values) - 1}
        )
    ps: list[Number] = []
    for k in range(1, len(values)):
        lower, upper = moment_bounds(values, k)
        width = upper - lower
        tol = 0 if mode is Mode.RATIONAL else DETERMINANT_TOL
        if width < -tol:
            raise InvalidMomentSequenceError(f"c_{k}^+ < c_{k}^-", details={"k": k})
        p = _unit_clamped((values[k] - lower) / width, k, mode)
        ps.append(p)
        if _as_terminal(p, mode) is not None:
            break
    return CanonicalSequence.from_values(ps, mode)


def lanczos_coefficients(mu: DesignMeasure) -> tuple[list[float], list[float]]:
    """alpha_0..alpha_{n-1} and beta_1..beta_{n-1} of a float design on its atoms.

    Lanczos on diag(support) started from sqrt(weights), with full
    reorthogonalization at every step. The recursion ends after n steps or
    when the residual vanishes.
    """
    x = np.asarray([float(v) for v in mu.support])
    q = np.sqrt(np.asarray([float(w) for w in mu.weights]))
    basis = [q / np.linalg.norm(q)]
    alphas: list[float] = []
    betas: list[float] = []
    while True:
        vec = x * basis[-1]
        alphas.append(float(basis[-1] @ vec))
        Q = np.asarray(basis)
        for _ in range(2):
            vec = vec - Q.T @ (Q @ vec)
        length = float(np.linalg.norm(vec))
        if len(basis) == len(x) or length <= LANCZOS_TOL:
            return alphas, betas
        betas.append(length**2)
        basis.append(vec / length)


def measure_to_canonical(mu: DesignMeasure) -> CanonicalSequence:
    """Canonical moments of a design on [0,1], computed from its atoms.

    Rational designs go through their exact moments. Float designs go through
    their recurrence coefficients, inverting alpha_k = zeta_{2k} + zeta_{2k+1}
    and beta_k = zeta_{2k-1} zeta_{2k}; the sequence always terminates.
    """
    if mu.domain is not Domain.UNIT:
        raise InvalidInputError("canonical moments are defined here for measures on [0,1]")
    if mu.mode is Mode.RATIONAL:
        return moments_to_canonical(moments(mu, 2 * len(mu)))
    alphas, betas = lanczos_coefficients(mu)
    ps: list[float] = []
    zeta = 0.0
    for k, alpha in enumerate(alphas):
        beta = betas[k] if k < len(betas) else 0.0
        for odd in (True, False):
            zeta = alpha - zeta if odd else beta / zeta
            p = zeta / (1 - ps[-1]) if ps else zeta
            ps.append(_unit_clamped(p, len(ps) + 1, Mode.FLOAT))
            if _as_terminal(ps[-1], Mode.FLOAT) is not None:
                return CanonicalSequence.from_values(ps, Mode.FLOAT)
    # unreachable: the last beta is zero
    return CanonicalSequence.from_values(ps, Mode.FLOAT)


def canonical_from_hankel_ratios(c: MomentSequence) -> CanonicalSequence:
    """Canonical moments from the Hankel-ratio expressions.

    p_{2k-1} = H_k^(1) Hb_{k-1}^(0) / (H_k^(0) Hb_{k-1}^(1)),
    p_{2k}   = H_{k+1}^(0) Hb_{k-1}^(1) / (H_k^(1) Hb_k^(0)).
    """
    values, mode = _unpack(c)
    K = len(values) - 1
    ps: list[Number] = []
    for idx in range(1, K + 1):
        k = (idx + 1) // 2
        if idx % 2:
            num = hankel(values, k, 1) * hankel(values, k - 1, 0, barred=True)
            den = hankel(values, k, 0) * hankel(values, k - 1, 1, barred=True)
        else:
            num = hankel(values, k + 1, 0) * hankel(values, k - 1, 1, barred=True)
            den = hankel(values, k, 1) * hankel(values, k, 0, barred=True)
        if is_zero(den, mode, DETERMINANT_TOL):
            raise ZeroDenominatorError(f"vanishing denominator for p_{idx}", details={"k": idx})
        p = num / den
        if mode is Mode.FLOAT:
            p = min(max(p, 0.0), 1.0)
        ps.append(p)
        if _as_terminal(p, mode) is not None:
            break
    return CanonicalSequence.from_values(ps, mode)


def canonical_to_zeta(p: CanonicalSequence) -> ZetaSequence:
    """zeta_1 = p_1, zeta_k = (1 - p_{k-1}) p_k."""
    return ZetaSequence(tuple(_zeta_values(p.values)), p.mode)


def _zeta_values(ps: Sequence[Number]) -> list[Number]:
    zetas = []
    prev = ps[0] * 0 if ps else 0
    for p in ps:
        zetas.append((1 - prev) * p)
        prev = p
    return zetas


def zeta_padded(p: CanonicalSequence, n: int) -> tuple[Number, ...]:
    """zeta_1..zeta_n; beyond termination zeta vanishes."""
    vals = p.values
    if n > len(vals) and not p.terminates:
        raise InsufficientDepthError(
            f"canonical depth {len(vals)} < required {n}",
            details={"depth": len(vals), "required": n},
        )
    zetas = _zeta_values(vals[:n])
    zero = coerce(0, p.mode)
    return (*zetas, *([zero] * (n - len(zetas))))


def zeta_to_canonical(z: ZetaSequence) -> CanonicalSequence:
    """Inverse of canonical_to_zeta: p_1 = zeta_1, p_k = zeta_k / (1 - p_{k-1})."""
    mode = z.mode
    tol = 0 if mode is Mode.RATIONAL else ZETA_TOL
    ps: list[Number] = []
    prev = coerce(0, mode)
    n = len(z.values)
    for k, zeta in enumerate(z.values, start=1):
        if k > 1:
            if is_zero(1 - prev, mode, ZETA_TOL):
                raise InvalidZetaError(
                    f"division by 1 - p_{k - 1} = 0",
                    details={"k": k - 1},
                )
            p = zeta / (1 - prev)
        else:
            p = zeta
        if p < -tol or p > 1 + tol:
            raise InvalidZetaError(f"recovered p_{k} = {p} outside [0,1]", details={"k": k})
        if mode is Mode.FLOAT:
            p = min(max(p, 0.0), 1.0)
        if k < n and _as_terminal(p, mode) is not None:
            raise InvalidZetaError(f"p_{k} is terminal before the last index", details={"k": k})
        ps.append(p)
        prev = p
    return CanonicalSequence.from_values(ps, mode)


def jacobi_coefficients(
    p: CanonicalSequence, size: int, strict: bool = True
) -> tuple[list[Number], list[Number]]:
    """Recurrence coefficients alpha_0..alpha_{size-1} and beta_1..beta_{size-1}.

    alpha_0 = zeta_1, alpha_k = zeta_{2k} + zeta_{2k+1}, beta_k = zeta_{2k-1} zeta_{2k}.
    With strict=False, zetas past the depth of a non-terminating p are taken as
    zero; callers use this only when those entries cannot reach the result.
    """
    need = 2 * size - 1 if size else 0
    have = need if (strict or p.terminates) else min(need, p.depth)
    zero = coerce(0, p.mode)
    zetas = (zero, *zeta_padded(p, have), *([zero] * (need - have)))
    alphas = [zetas[2 * k] + zetas[2 * k + 1] for k in range(size)]
    betas = [zetas[2 * k - 1] * zetas[2 * k] for k in range(1, size)]
    return alphas, betas


def canonical_to_moments(p: CanonicalSequence, K: int) -> MomentSequence:
    """Moments c_0..c_K of the measure with canonical moments p.

    c_k is the (0,0) entry of J^k for the tridiagonal recurrence operator J,
    taken in its unsymmetric form (diagonal alpha, super-diagonal beta,
    sub-diagonal 1) so that rational inputs stay exact.
    """
    if K < 0:
        raise InvalidInputError(f"K must be nonnegative, got {K}")
    if not p.terminates and K > p.depth:
        raise InsufficientDepthError(
            f"c_{K} needs canonical depth {K}, have {p.depth}",
            details={"depth": p.depth, "required": K},
        )
    size = K // 2 + 1
    alphas, betas = jacobi_coefficients(p, size, strict=False)
    one = coerce(1, p.mode)
    vec = [one] + [one * 0] * (size - 1)
    values = [one]
    for _ in range(K):
        nxt = []
        for i in range(size):
            v = alphas[i] * vec[i]
            if i + 1 < size:
                v += betas[i] * vec[i + 1]
            if i > 0:
                v += vec[i - 1]
            nxt.append(v)
        vec = nxt
        values.append(vec[0])
    return MomentSequence(tuple(values), Domain.UNIT, p.mode)


def hankel_product(p: CanonicalSequence, m: int) -> Number:
    """H_m^(0) = prod_{k=1}^{m-1} (zeta_{2k-1} zeta_{2k})^{m-k}."""
    if m < 1:
        raise InvalidInputError(f"m must be >= 1, got {m}")
    zetas = (coerce(0, p.mode), *zeta_padded(p, 2 * m - 2))
    result = coerce(1, p.mode)
    for k in range(1, m):
        result *= (zetas[2 * k - 1] * zetas[2 * k]) ** (m - k)
    return result


def hankel_product_canonical(p: CanonicalSequence, m: int) -> Number:
    """The same product written directly in canonical moments."""
    if m < 1:
        raise InvalidInputError(f"m must be >= 1, got {m}")
    ps = (None, *p.padded(2 * m - 2))
    result = coerce(1, p.mode)
    for j in range(1, m):
        even, odd = ps[2 * j], ps[2 * j - 1]
        result *= (1 - even) ** (m - j - 1) * even ** (m - j)
        result *= ((1 - odd) * odd) ** (m - j)
    return result


def zeta_from_hankel(c: MomentSequence, k: int) -> Number:
    """zeta_k from the Hankel-ratio expression (used as a cross-check)."""
    values, mode = _unpack(c)
    j, odd = divmod(k, 2)
    if odd:
        j += 1
        num = hankel(values, j, 1) * hankel(values, j - 1, 0)
        den = hankel(values, j, 0) * hankel(values, j - 1, 1)
    else:
        num = hankel(values, j + 1, 0) * hankel(values, j - 1, 1)
        den = hankel(values, j, 1) * hankel(values, j, 0)
    if is_zero(den, mode, DETERMINANT_TOL):
        raise ZeroDenominatorError(f"vanishing denominator for zeta_{k}", details={"k": k})
    return num / den


def describe(p: CanonicalSequence) -> dict[str, Any]:
    """JSON view of a canonical sequence."""
    return {
        "values": p.to_list(),
        "terminal": to_json(p.terminal) if p.terminal is not None else None,
        "depth": p.depth,
    }
