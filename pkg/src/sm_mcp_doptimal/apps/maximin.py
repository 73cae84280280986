"""Maximin optimal designs for estimating sum_k g_k(theta_k) in weighted polynomial regression.

gamma(mu, theta) = sum_k g_k'(theta_k)^2 psi_k(mu) with psi_k = H_{k+1}^(T) / H_k^(T).
The worst case over the box Theta is approached by maximizing the power mean
(int gamma^p dpi / int dpi)^(1/p) along a decreasing schedule of negative p,
each stage warm-started from the previous maximizer.
"""

import logging
import math
from dataclasses import dataclass, field
from typing import Any, Self

import numpy as np
from numpy.polynomial import legendre
from numpy.polynomial import polynomial as P
from scipy.special import logsumexp

from ..config import DEFAULT_CUBATURE_NODES, DEFAULT_P_SCHEDULE, SolveOptions
from ..design.canonical import CanonicalSequence
from ..design.optimize import (
    DesignResult,
    multistart_minimize,
    no_prior_pattern,
    reconstruct_design,
    snap,
)
from ..design.toda import (
    ModelSpec,
    hankel_ratio_from_table,
    multiset_from_model,
    objective_depth,
    zeta_chain,
)
from ..errors import (
    DegenerateStepError,
    InvalidInputError,
    NonfinitePowerError,
    ZeroDenominatorError,
)
from ..numeric import Mode, Number

logger = logging.getLogger(__name__)

# Points per axis of the grid used for min_theta gamma
DEFAULT_THETA_GRID = 101


@dataclass(frozen=True)
class MaximinSpec:
    """Weighted model, target polynomials g_k and the parameter box."""

    model: ModelSpec
    g: tuple[tuple[float, ...], ...]
    theta_box: tuple[tuple[float, float], ...]
    p_schedule: tuple[float, ...] = DEFAULT_P_SCHEDULE
    nodes: int = DEFAULT_CUBATURE_NODES

    def __post_init__(self):
        m = self.model.m
        g = tuple(tuple(float(c) for c in coeffs) for coeffs in self.g)
        box = tuple((float(s), float(t)) for s, t in self.theta_box)
        schedule = tuple(float(p) for p in self.p_schedule)
        if len(g) != m or len(box) != m:
            raise InvalidInputError(
                "need one polynomial and one interval per parameter",
                details={"m": m, "g": len(g), "theta_box": len(box)},
            )
        if any(not coeffs for coeffs in g):
            raise InvalidInputError("polynomial coefficient lists must be nonempty")
        for k, (s, t) in enumerate(box):
            if not s < t:
                raise InvalidInputError(f"theta_box[{k}] = [{s}, {t}] is empty")
        if not schedule or any(p >= 0 for p in schedule):
            raise InvalidInputError("p_schedule must be a nonempty list of negative exponents")
        if any(b >= a for a, b in zip(schedule, schedule[1:])):
            raise InvalidInputError("p_schedule must be strictly decreasing")
        if self.nodes < 1:
            raise InvalidInputError(f"cubature needs at least one node, got {self.nodes}")
        object.__setattr__(self, "g", g)
        object.__setattr__(self, "theta_box", box)
        object.__setattr__(self, "p_schedule", schedule)

    @property
    def m(self) -> int:
        return self.model.m

    def derivative(self, k: int) -> np.ndarray:
        return P.polyder(np.asarray(self.g[k]))

    def degree(self, k: int) -> int:
        coeffs = np.trim_zeros(np.asarray(self.g[k]), "b")
        return max(len(coeffs) - 1, 0)

    def to_dict(self) -> dict[str, Any]:
        return {
            **self.model.to_dict(),
            "g": [list(c) for c in self.g],
            "theta_box": [list(b) for b in self.theta_box],
            "p_schedule": list(self.p_schedule),
            "nodes": self.nodes,
        }

    @classmethod
    def from_dict(cls, data: dict[str, Any], mode: Mode = Mode.FLOAT) -> Self:
        missing = [key for key in ("m", "g", "theta_box") if key not in data]
        if missing:
            raise InvalidInputError(f"maximin spec is missing field(s): {', '.join(missing)}")
        return cls(
            model=ModelSpec.from_dict(data, mode),
            g=tuple(tuple(c) for c in data["g"]),
            theta_box=tuple(tuple(b) for b in data["theta_box"]),
            p_schedule=tuple(data.get("p_schedule", DEFAULT_P_SCHEDULE)),
            nodes=int(data.get("nodes", DEFAULT_CUBATURE_NODES)),
        )


def psi_values(p: CanonicalSequence, spec: ModelSpec, count: int) -> list[Number]:
    """psi_0..psi_{count-1} from a single Toda chain."""
    T = multiset_from_model(spec)
    table = zeta_chain(p, T, 2 * (count - 1))
    out = []
    for k in range(count):
        h_k = table.c0**k
        for j in range(1, k):
            h_k *= (table.zeta(2 * j - 1) * table.zeta(2 * j)) ** (k - j)
        if h_k == 0:
            raise ZeroDenominatorError(f"H_{k}^(T) vanishes", details={"k": k})
        out.append(hankel_ratio_from_table(table, k))
    return out


def psi_k(p: CanonicalSequence, spec: ModelSpec, k: int) -> Number:
    """psi_k = H_{k+1}^(T) / H_k^(T) = c_0^(T) prod_{j<=k} zeta_{2j-1}^(T,0) zeta_{2j}^(T,0)."""
    if k < 0:
        raise InvalidInputError(f"k must be nonnegative, got {k}")
    return psi_values(p, spec, k + 1)[k]


def _coefficients(p: CanonicalSequence, spec: MaximinSpec) -> np.ndarray:
    return np.array([float(v) for v in psi_values(p, spec.model, spec.m)])


def gamma(p: CanonicalSequence, spec: MaximinSpec, theta: np.ndarray | list[float]) -> float:
    """sum_k g_k'(theta_k)^2 psi_k."""
    theta = np.asarray(theta, dtype=float)
    for k, (s, t) in enumerate(spec.theta_box):
        if not s <= theta[k] <= t:
            raise InvalidInputError(f"theta_{k} = {theta[k]} outside [{s}, {t}]")
    psi = _coefficients(p, spec)
    slopes = np.array([P.polyval(theta[k], spec.derivative(k)) for k in range(spec.m)])
    return float(np.sum(slopes**2 * psi))


@dataclass
class Cubature:
    """Tensor Gauss-Legendre rule on the box, with the prior density folded into the weights."""

    axes: list[np.ndarray]
    slopes_sq: list[np.ndarray]
    weights: list[np.ndarray]
    total: float = field(init=False)

    def __post_init__(self):
        self.total = float(np.prod([w.sum() for w in self.weights]))


def prior_density(spec: MaximinSpec, k: int, theta: np.ndarray) -> np.ndarray:
    """h_k = d/dtheta (g_k')^2 = 2 g_k' g_k'' when deg g_k >= 2, else 1."""
    if spec.degree(k) < 2:
        return np.ones_like(theta)
    d1 = spec.derivative(k)
    d2 = P.polyder(d1)
    return 2 * P.polyval(theta, d1) * P.polyval(theta, d2)


def build_cubature(spec: MaximinSpec, nodes: int | None = None) -> Cubature:
    """Nodes, squared slopes and pi-weights per axis."""
    x, w = legendre.leggauss(nodes or spec.nodes)
    axes, slopes_sq, weights = [], [], []
    for k, (s, t) in enumerate(spec.theta_box):
        theta = 0.5 * (t - s) * x + 0.5 * (t + s)
        h = prior_density(spec, k, theta)
        if np.any(h < 0):
            raise InvalidInputError(
                f"prior density h_{k} is negative on [{s}, {t}]",
                details={"k": k, "min": float(h.min())},
            )
        axes.append(theta)
        slopes_sq.append(P.polyval(theta, spec.derivative(k)) ** 2)
        weights.append(0.5 * (t - s) * w * h)
    return Cubature(axes, slopes_sq, weights)


def _gamma_grid(psi: np.ndarray, slopes_sq: list[np.ndarray]) -> np.ndarray:
    grid = np.zeros([len(a) for a in slopes_sq])
    for k, a in enumerate(slopes_sq):
        shape = [1] * len(slopes_sq)
        shape[k] = len(a)
        grid = grid + (psi[k] * a).reshape(shape)
    return grid


def _weight_grid(weights: list[np.ndarray]) -> np.ndarray:
    grid = np.ones([len(w) for w in weights])
    for k, w in enumerate(weights):
        shape = [1] * len(weights)
        shape[k] = len(w)
        grid = grid * w.reshape(shape)
    return grid


def _log_integral(psi: np.ndarray, cub: Cubature, pexp: float) -> float:
    """log int gamma^pexp dpi; summed in log space so large negative pexp stays finite."""
    g = _gamma_grid(psi, cub.slopes_sq)
    if np.any(g <= 0) or not np.all(np.isfinite(g)):
        raise NonfinitePowerError(
            "gamma is not positive on the cubature grid",
            details={"min_gamma": float(np.min(g))},
        )
    return float(logsumexp(pexp * np.log(g), b=_weight_grid(cub.weights)))


def p_mean_objective(
    p: CanonicalSequence, spec: MaximinSpec, pexp: float, nodes: int | None = None
) -> float:
    """int_Theta gamma^pexp dpi by tensor Gauss-Legendre cubature."""
    if not pexp < 0:
        raise InvalidInputError(f"pexp must be negative, got {pexp}")
    log_value = _log_integral(_coefficients(p, spec), build_cubature(spec, nodes), pexp)
    return math.exp(log_value)


def power_mean(
    p: CanonicalSequence, spec: MaximinSpec, pexp: float, nodes: int | None = None
) -> float:
    """(int gamma^pexp dpi / int dpi)^(1/pexp); lies between min and max of gamma."""
    cub = build_cubature(spec, nodes)
    if not pexp < 0:
        raise InvalidInputError(f"pexp must be negative, got {pexp}")
    log_value = _log_integral(_coefficients(p, spec), cub, pexp)
    return math.exp((log_value - math.log(cub.total)) / pexp)


def min_gamma(p: CanonicalSequence, spec: MaximinSpec, grid: int = DEFAULT_THETA_GRID) -> float:
    """min of gamma over a uniform grid of Theta; gamma is separable in theta."""
    psi = _coefficients(p, spec)
    total = 0.0
    for k, (s, t) in enumerate(spec.theta_box):
        theta = np.linspace(s, t, grid)
        total += float(np.min(P.polyval(theta, spec.derivative(k)) ** 2 * psi[k]))
    return total


def _stage_loss(spec: MaximinSpec, cub: Cubature, pexp: float):
    def loss(x: np.ndarray) -> float:
        p = CanonicalSequence(tuple(float(v) for v in x))
        try:
            log_value = _log_integral(_coefficients(p, spec), cub, pexp)
        except (DegenerateStepError, ZeroDenominatorError, NonfinitePowerError):
            return math.inf
        if not math.isfinite(log_value):
            return math.inf
        # -log of the power mean
        return -(log_value - math.log(cub.total)) / pexp

    return loss


def solve_maximin(spec: MaximinSpec, opts: SolveOptions | None = None) -> list[DesignResult]:
    """One DesignResult per exponent in p_schedule; the last approximates the maximin design."""
    opts = opts or SolveOptions()
    dim = max(objective_depth(spec.model), 1)
    cub = build_cubature(spec)
    start = no_prior_pattern(spec.m, dim)
    path: list[DesignResult] = []
    for pexp in spec.p_schedule:
        outcome = multistart_minimize(
            _stage_loss(spec, cub, pexp), dim, opts, start, label=f"maximin p={pexp:g}"
        )
        if not math.isfinite(outcome.loss):
            raise NonfinitePowerError(
                f"no design with positive gamma found at p = {pexp}",
                details={"pexp": pexp},
            )
        start = outcome.x
        p, snapped, appended = snap(outcome.x, opts)
        measure = reconstruct_design(p)
        value = power_mean(p, spec, pexp)
        diagnostics = {
            "pexp": pexp,
            "log_p_mean_integral": _log_integral(_coefficients(p, spec), cub, pexp),
            "min_gamma": min_gamma(p, spec),
            "psi": _coefficients(p, spec).tolist(),
            "iterations": outcome.iterations,
            "best_restart": outcome.best_restart,
            "snapped_indices": snapped,
            "appended_terminal": appended,
        }
        logger.info(f"maximin stage p={pexp:g}: power mean {value:.10g}")
        path.append(DesignResult(p, measure, value, diagnostics))
    return path
