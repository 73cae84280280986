"""Generalized moments and the Toda evaluation of H_m^(T).

A ZetaTable holds zeta_k^(T,s), the qd factors of the recurrence operator of
the measure weighted by prod_{l in T} (x - l), shifted by s, together with the
scalar c_0^(T). Two sweeps move between tables:

- reparam_shift: same stage T, new shift. The factors of J - s1 and J - s2
  agree index for index, so the table keeps its length.
- toda_step: stage T -> T + {s}, new shift. One index is consumed.

Starting from the canonical zetas at (empty, 0), one shift and |T| Toda steps
reach (T, 0), where H_m^(T) = (c_0^(T))^m prod_{j<m} (zeta_{2j-1} zeta_{2j})^{m-j}.
"""

import logging
from collections.abc import Iterable, Sequence
from dataclasses import dataclass, field
from typing import Any, Self

from ..config import DEGENERATE_REL_TOL
from ..errors import (
    DegenerateStepError,
    InsufficientMomentsError,
    InvalidInputError,
)
from ..numeric import Mode, Number, coerce, coerce_all, to_json
from .canonical import CanonicalSequence, zeta_padded
from .measure import MomentSequence

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class PriorMultiset:
    """Multiset of real values, stored as (value, multiplicity) in insertion order."""

    entries: tuple[tuple[Number, int], ...] = ()

    def __post_init__(self):
        merged: dict[Number, int] = {}
        for value, mult in self.entries:
            if isinstance(mult, bool) or not isinstance(mult, int) or mult < 1:
                raise InvalidInputError(f"multiplicity of {value} must be a positive integer")
            merged[value] = merged.get(value, 0) + mult
        object.__setattr__(self, "entries", tuple(merged.items()))

    @classmethod
    def of(cls, mapping: dict[Number, int] | Iterable[tuple[Number, int]]) -> Self:
        items = mapping.items() if isinstance(mapping, dict) else mapping
        return cls(tuple(items))

    @classmethod
    def from_elements(cls, elements: Iterable[Number]) -> Self:
        return cls(tuple((x, 1) for x in elements))

    @property
    def size(self) -> int:
        return sum(mult for _, mult in self.entries)

    def __len__(self) -> int:
        return self.size

    def __bool__(self) -> bool:
        return bool(self.entries)

    def multiplicity(self, value: Number) -> int:
        for x, mult in self.entries:
            if x == value:
                return mult
        return 0

    def elements(self) -> list[Number]:
        """Elements in processing order: ascending value, ties by insertion order."""
        order = sorted(range(len(self.entries)), key=lambda i: (self.entries[i][0], i))
        out: list[Number] = []
        for i in order:
            value, mult = self.entries[i]
            out.extend([value] * mult)
        return out

    def union(self, other: "PriorMultiset | Iterable[Number]") -> "PriorMultiset":
        extra = other.entries if isinstance(other, PriorMultiset) else [(x, 1) for x in other]
        return PriorMultiset((*self.entries, *extra))

    def to_list(self) -> list[list[Any]]:
        return [[to_json(x), mult] for x, mult in self.entries]


@dataclass(frozen=True)
class ModelSpec:
    """PRM_m(beta, b): m free parameters, prior roots beta_j of order b_j."""

    m: int
    beta: tuple[Number, ...] = ()
    b: tuple[int, ...] = ()

    def __post_init__(self):
        if isinstance(self.m, bool) or not isinstance(self.m, int) or self.m < 1:
            raise InvalidInputError(f"m must be a positive integer, got {self.m!r}")
        beta = tuple(self.beta)
        b = tuple(self.b)
        if len(beta) != len(b):
            raise InvalidInputError(
                "beta and b differ in length", details={"beta": len(beta), "b": len(b)}
            )
        if len(set(beta)) != len(beta):
            raise InvalidInputError("beta entries must be pairwise distinct")
        for bj in b:
            if isinstance(bj, bool) or not isinstance(bj, int) or bj < 1:
                raise InvalidInputError(f"b entries must be positive integers, got {bj!r}")
        object.__setattr__(self, "beta", beta)
        object.__setattr__(self, "b", b)

    @property
    def S(self) -> int:
        return sum(self.b)

    @property
    def l(self) -> int:  # noqa: E743
        return len(self.beta)

    def to_dict(self) -> dict[str, Any]:
        return {"m": self.m, "beta": [to_json(x) for x in self.beta], "b": list(self.b)}

    @classmethod
    def from_dict(cls, data: dict[str, Any], mode: Mode = Mode.FLOAT) -> Self:
        if "m" not in data:
            raise InvalidInputError("model spec is missing field 'm'")
        return cls(
            m=data["m"],
            beta=coerce_all(data.get("beta", []), mode),
            b=tuple(data.get("b", [])),
        )


@dataclass(frozen=True)
class ZetaTable:
    """zeta_1^(T,s)..zeta_K^(T,s) and c_0^(T) for one stage and shift."""

    stage: PriorMultiset
    shift: Number
    zetas: tuple[Number, ...]
    c0: Number
    mode: Mode = field(default=Mode.FLOAT)

    def __len__(self) -> int:
        return len(self.zetas)

    def zeta(self, k: int) -> Number:
        """zeta_k with zeta_0 = 0."""
        if k == 0:
            return coerce(0, self.mode)
        return self.zetas[k - 1]

    def to_dict(self) -> dict[str, Any]:
        return {
            "stage": self.stage.to_list(),
            "shift": to_json(self.shift),
            "zetas": [to_json(z) for z in self.zetas],
            "c0": to_json(self.c0),
        }


def multiset_from_model(spec: ModelSpec) -> PriorMultiset:
    """T with m_T(beta_j) = 2 b_j."""
    return PriorMultiset(tuple((beta, 2 * b) for beta, b in zip(spec.beta, spec.b)))


def objective_depth(spec: ModelSpec) -> int:
    """Canonical depth that H_m^(T) depends on: 2m - 2 + 2S."""
    return 2 * spec.m - 2 + 2 * spec.S


def gen_moments(c: MomentSequence | Sequence[Number], T: PriorMultiset) -> tuple[Number, ...]:
    """c_k^(T) for k = 0..K - |T|, applying c_k <- c_{k+1} - lambda c_k per element."""
    if isinstance(c, MomentSequence):
        values, mode = c.values, c.mode
    else:
        values = tuple(c)
        mode = Mode.infer(values)
    if len(values) <= T.size:
        raise InsufficientMomentsError(
            f"|T| = {T.size} needs more than {len(values)} moments",
            details={"available": len(values), "multiset_size": T.size},
        )
    out = list(values)
    for lam in T.elements():
        lam = coerce(lam, mode)
        out = [out[k + 1] - lam * out[k] for k in range(len(out) - 1)]
    return tuple(out)


def _qd_sweep(seq: Sequence[Number], delta: Number, mode: Mode) -> list[Number]:
    """One qd sweep of the factor sequence seq with spectral shift delta.

    new_{2k+1} = s_{2k} + s_{2k+1} + delta - new_{2k}
    new_{2k+2} = s_{2k+1} s_{2k+2} / new_{2k+1}

    new_0 = 0; returns new_1..new_{len(seq)-1}. A vanishing product stays zero
    without a division (it only occurs past the end of a terminated measure).

    In float mode an odd entry that cancelled to within DEGENERATE_REL_TOL of
    the terms it was summed from is treated as a zero denominator.
    """
    n = len(seq) - 1
    out: list[Number] = []
    prev = seq[0] * 0
    scale = prev
    for j in range(1, n + 1):
        if j % 2:
            value = seq[j - 1] + seq[j] + delta - prev
            scale = abs(seq[j - 1]) + abs(seq[j]) + abs(delta) + abs(prev)
        else:
            num = seq[j - 1] * seq[j]
            if num == 0:
                value = num
            elif prev == 0 or (mode is Mode.FLOAT and abs(prev) <= DEGENERATE_REL_TOL * scale):
                raise DegenerateStepError(
                    f"vanishing denominator at zeta_{j - 1} in qd sweep",
                    details={"index": j - 1, "value": to_json(prev), "scale": to_json(scale)},
                )
            else:
                value = num / prev
        out.append(value)
        prev = value
    return out


def reparam_shift(table: ZetaTable, lam1: Number) -> ZetaTable:
    """Same stage, shift table.shift -> lam1; the length is preserved."""
    if len(table) < 1:
        raise InvalidInputError("reparam_shift needs at least one zeta")
    lam1 = coerce(lam1, table.mode)
    seq = [coerce(0, table.mode), *table.zetas]
    zetas = _qd_sweep(seq, table.shift - lam1, table.mode)
    return ZetaTable(table.stage, lam1, tuple(zetas), table.c0, table.mode)


def c0_propagate(c0: Number, zeta1: Number) -> Number:
    """c_0^(T + {s}) = zeta_1^(T,s) c_0^(T)."""
    return zeta1 * c0


def toda_step(table: ZetaTable, lam2: Number) -> ZetaTable:
    """(T, lam1) -> (T + {lam1}, lam2); consumes one index."""
    if len(table) < 1:
        raise InvalidInputError("toda_step needs at least one zeta")
    lam2 = coerce(lam2, table.mode)
    zetas = _qd_sweep(list(table.zetas), table.shift - lam2, table.mode)
    c0 = c0_propagate(table.c0, table.zetas[0])
    stage = table.stage.union([table.shift])
    return ZetaTable(stage, lam2, tuple(zetas), c0, table.mode)


def initial_table(p: CanonicalSequence, length: int) -> ZetaTable:
    """Table at (empty, 0): the ordinary zetas of p, c_0 = 1."""
    zetas = zeta_padded(p, length)
    return ZetaTable(PriorMultiset(), coerce(0, p.mode), zetas, coerce(1, p.mode), p.mode)


def zeta_chain(p: CanonicalSequence, T: PriorMultiset, length: int) -> ZetaTable:
    """Table at (T, 0) with `length` zetas, computed from p by shift and Toda steps.

    Needs canonical depth length + |T| unless p terminates.
    """
    mode = p.mode
    elements = [coerce(x, mode) for x in T.elements()]
    table = initial_table(p, length + len(elements))
    if not elements:
        return table
    if elements[0] != 0:
        table = reparam_shift(table, elements[0])
    for i in range(len(elements)):
        nxt = elements[i + 1] if i + 1 < len(elements) else coerce(0, mode)
        table = toda_step(table, nxt)
        if table.c0 == 0:
            logger.debug("stage collapsed: c_0^(T) = 0")
    return table


def hankel_from_table(table: ZetaTable, m: int) -> Number:
    """(c_0^(T))^m prod_{j=1}^{m-1} (zeta_{2j-1} zeta_{2j})^{m-j} at shift 0."""
    result = table.c0**m
    for j in range(1, m):
        result *= (table.zeta(2 * j - 1) * table.zeta(2 * j)) ** (m - j)
    return result


def hankel_ratio_from_table(table: ZetaTable, k: int) -> Number:
    """H_{k+1}^(T) / H_k^(T) = c_0^(T) prod_{j=1}^{k} zeta_{2j-1} zeta_{2j}."""
    result = table.c0
    for j in range(1, k + 1):
        result *= table.zeta(2 * j - 1) * table.zeta(2 * j)
    return result


def evaluate_objective(p: CanonicalSequence, spec: ModelSpec) -> Number:
    """H_m^(T) for T = multiset_from_model(spec), evaluated through the Toda chain.

    Only p_1..p_{2m-2+2S} are read; later entries do not affect the value.
    """
    return hankel_via_toda(p, multiset_from_model(spec), spec.m)


def hankel_via_toda(p: CanonicalSequence, T: PriorMultiset, m: int) -> Number:
    """H_m^(T) of the measure with canonical moments p, for any multiset T."""
    table = zeta_chain(p, T, 2 * m - 2)
    if table.c0 == 0:
        return table.c0
    return hankel_from_table(table, m)
