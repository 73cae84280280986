"""Invariant suite run by the `check` command.

Each check draws random instances, mostly exact-rational, and compares the
Toda pipeline against its determinant ground truth, or a map against its
inverse.
"""

import logging
import random
import time
from collections.abc import Callable
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any

from .design.canonical import (
    CanonicalSequence,
    canonical_from_hankel_ratios,
    canonical_to_moments,
    canonical_to_zeta,
    measure_to_canonical,
    moments_to_canonical,
    zeta_from_hankel,
)
from .design.measure import DesignMeasure, Domain, moments
from .design.optimize import reconstruct_design
from .design.oracle import gen_canonical_det, gen_zeta_table, info_matrix_det, multiset_hankel
from .design.toda import (
    ModelSpec,
    PriorMultiset,
    evaluate_objective,
    multiset_from_model,
    objective_depth,
    reparam_shift,
    toda_step,
)
from .errors import DesignError, InvalidInputError
from .numeric import Mode

logger = logging.getLogger(__name__)

# Prior configurations (beta, b) the pipeline checks cycle through
PRIOR_CHOICES: tuple[tuple[tuple[int, ...], tuple[int, ...]], ...] = (
    ((), ()),
    ((2,), (1,)),
    ((-1,), (1,)),
    ((2, 3), (1, 1)),
)
SHIFT_CHOICES = (Fraction(-1), Fraction(2), Fraction(3), Fraction(-1, 2), Fraction(5, 2))
FLOAT_REL_TOL = 1e-8
ROUND_TRIP_TOL = 1e-7
MAX_FLOAT_DEPTH = 8
PADDING_REL_TOL = 1e-9


def random_rational_measure(
    rng: random.Random, max_atoms: int = 5, min_atoms: int = 1, denominator: int = 12
) -> DesignMeasure:
    """Measure on [0,1] with distinct atoms k/denominator and positive rational weights."""
    count = rng.randint(min_atoms, max_atoms)
    support = [Fraction(k, denominator) for k in rng.sample(range(denominator + 1), count)]
    raw = [rng.randint(1, 9) for _ in range(count)]
    total = sum(raw)
    weights = [Fraction(w, total) for w in raw]
    return DesignMeasure(Domain.UNIT, tuple(support), tuple(weights), Mode.RATIONAL)


def random_model(rng: random.Random, m_choices: tuple[int, ...] = (2, 3, 4)) -> ModelSpec:
    beta, b = rng.choice(PRIOR_CHOICES)
    return ModelSpec(rng.choice(m_choices), tuple(Fraction(x) for x in beta), b)


def _relative_gap(a: float, b: float) -> float:
    scale = max(abs(a), abs(b))
    return abs(a - b) / scale if scale > 0 else 0.0


@dataclass
class CheckOutcome:
    """Pass/fail counts of one invariant over its random instances."""

    name: str
    passed: int = 0
    failed: int = 0
    seconds: float = 0.0
    failures: list[dict[str, Any]] = field(default_factory=list)

    def record(self, ok: bool, **context: Any) -> None:
        if ok:
            self.passed += 1
        else:
            self.failed += 1
            if len(self.failures) < 5:
                self.failures.append(context)

    def to_dict(self) -> dict[str, Any]:
        return {
            "passed": self.passed,
            "failed": self.failed,
            "seconds": round(self.seconds, 3),
            "failures": self.failures,
        }


@dataclass
class CheckReport:
    """Outcomes of every check in the suite."""

    seed: int
    instances: int
    outcomes: list[CheckOutcome] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return all(o.failed == 0 for o in self.outcomes)

    @property
    def passed(self) -> int:
        return sum(o.passed for o in self.outcomes)

    @property
    def failed(self) -> int:
        return sum(o.failed for o in self.outcomes)

    def to_dict(self) -> dict[str, Any]:
        return {
            "seed": self.seed,
            "instances": self.instances,
            "passed": self.passed,
            "failed": self.failed,
            "ok": self.ok,
            "checks": {o.name: o.to_dict() for o in self.outcomes},
        }


def random_float_canonical(
    rng: random.Random, max_depth: int = MAX_FLOAT_DEPTH
) -> CanonicalSequence:
    """Terminating float sequence: interior values in [0.1, 0.9], then a random 0 or 1."""
    depth = rng.randint(2, max_depth)
    interior = tuple(rng.uniform(0.1, 0.9) for _ in range(depth - 1))
    return CanonicalSequence(interior, float(rng.randint(0, 1)))


def check_pipeline(rng: random.Random, instances: int) -> CheckOutcome:
    """evaluate_objective equals the generalized Hankel determinant.

    Exact in rational mode, within FLOAT_REL_TOL in float mode.
    """
    outcome = CheckOutcome("pipeline_vs_determinant")
    for _ in range(instances):
        mu = random_rational_measure(rng)
        spec = random_model(rng)
        c = moments(mu, objective_depth(spec) + 1)
        p = measure_to_canonical(mu)
        try:
            truth = multiset_hankel(c, spec)
            exact = evaluate_objective(p, spec)
            approx = evaluate_objective(
                CanonicalSequence.from_values([float(v) for v in p.values]), spec
            )
        except DesignError as e:
            outcome.record(False, model=spec.to_dict(), error=e.code)
            continue
        ok = exact == truth and _relative_gap(float(approx), float(truth)) <= FLOAT_REL_TOL
        outcome.record(ok, model=spec.to_dict(), design=mu.to_dict())
    return outcome


def check_toda_residuals(rng: random.Random, instances: int, length: int = 4) -> CheckOutcome:
    """The shift and Toda sweeps map determinant tables onto determinant tables."""
    outcome = CheckOutcome("toda_residuals")
    for _ in range(instances):
        mu = random_rational_measure(rng, max_atoms=6, min_atoms=6)
        beta, b = rng.choice(PRIOR_CHOICES)
        T = multiset_from_model(ModelSpec(1, tuple(Fraction(x) for x in beta), b))
        s1, s2 = rng.sample(SHIFT_CHOICES, 2)
        c = moments(mu, 2 * length + T.size + 4)
        try:
            start = gen_zeta_table(c, T, s1, length)
            shifted = gen_zeta_table(c, T, s2, length)
            stepped = gen_zeta_table(c, T.union([s1]), s2, length - 1)
            ok_shift = reparam_shift(start, s2).zetas == shifted.zetas
            step = toda_step(start, s2)
            ok_step = step.zetas == stepped.zetas and step.c0 == stepped.c0
        except DesignError as e:
            outcome.record(False, stage=T.to_list(), error=e.code)
            continue
        outcome.record(
            ok_shift and ok_step,
            stage=T.to_list(),
            shifts=[str(s1), str(s2)],
            shift_relation=ok_shift,
            toda_relation=ok_step,
        )
    return outcome


def check_information_matrix(rng: random.Random, instances: int) -> CheckOutcome:
    """det M(mu) equals H_m^(T) of the moments of mu."""
    outcome = CheckOutcome("information_matrix")
    for _ in range(instances):
        mu = random_rational_measure(rng)
        spec = random_model(rng)
        c = moments(mu, objective_depth(spec) + 1)
        ok = info_matrix_det(mu, spec) == multiset_hankel(c, spec)
        outcome.record(ok, model=spec.to_dict(), design=mu.to_dict())
    return outcome


def check_determinant_forms(rng: random.Random, instances: int) -> CheckOutcome:
    """Hankel-ratio forms of p_k and zeta_k agree with the moment-space bounds.

    Compared exactly at every index before termination, for the ordinary
    ratios and for the signed generalized form at T = empty.
    """
    outcome = CheckOutcome("determinant_forms")
    for _ in range(instances):
        mu = random_rational_measure(rng)
        p = measure_to_canonical(mu)
        interior = p.depth - 1
        c = moments(mu, 2 * len(mu))
        try:
            zetas = canonical_to_zeta(p)
            ratios = canonical_from_hankel_ratios(moments(mu, interior)).values
            signed = [gen_canonical_det(c, PriorMultiset(), k) for k in range(1, interior + 1)]
            zeta_forms = [zeta_from_hankel(c, k) for k in range(1, interior + 1)]
        except DesignError as e:
            outcome.record(False, design=mu.to_dict(), error=e.code)
            continue
        expected = list(p.values[:interior])
        ok = (
            list(ratios) == expected
            and signed == expected
            and zeta_forms == list(zetas.values[:interior])
        )
        outcome.record(ok, design=mu.to_dict())
    return outcome


def check_round_trips(rng: random.Random, instances: int) -> CheckOutcome:
    """Conversions between moments, canonical moments and designs invert each other.

    moments -> canonical -> moments is exact; canonical -> design -> moments holds
    in float. A random float canonical sequence also survives
    canonical -> design -> canonical within ROUND_TRIP_TOL, at the same depth.
    """
    outcome = CheckOutcome("round_trips")
    for _ in range(instances):
        mu = random_rational_measure(rng)
        K = 2 * len(mu) + 2
        c = moments(mu, K)
        q = random_float_canonical(rng)
        try:
            p = moments_to_canonical(c)
            back = canonical_to_moments(p, K)
            rebuilt = moments(reconstruct_design(p), K)
            recovered = measure_to_canonical(reconstruct_design(q))
        except DesignError as e:
            outcome.record(False, design=mu.to_dict(), canonical=q.to_list(), error=e.code)
            continue
        exact = back.values == c.values and measure_to_canonical(mu) == p
        close = all(abs(float(a) - b) <= FLOAT_REL_TOL for a, b in zip(c.values, rebuilt.values))
        float_trip = recovered.depth == q.depth and all(
            abs(a - b) <= ROUND_TRIP_TOL for a, b in zip(q.values, recovered.values)
        )
        outcome.record(
            exact and close and float_trip,
            design=mu.to_dict(),
            canonical=q.to_list(),
            exact=exact,
            reconstructed=close,
            float_round_trip=float_trip,
        )
    return outcome


def check_padding(rng: random.Random, instances: int) -> CheckOutcome:
    """Canonical moments past the objective depth do not change H_m^(T)."""
    outcome = CheckOutcome("padding_independence")
    for _ in range(instances):
        spec = random_model(rng)
        depth = objective_depth(spec)
        values = [rng.uniform(0.05, 0.95) for _ in range(depth + 2)]
        other = values[:depth] + [rng.uniform(0.05, 0.95) for _ in range(2)]
        try:
            a = float(evaluate_objective(CanonicalSequence(tuple(values)), spec))
            b = float(evaluate_objective(CanonicalSequence(tuple(other)), spec))
        except DesignError as e:
            outcome.record(False, model=spec.to_dict(), error=e.code)
            continue
        outcome.record(_relative_gap(a, b) <= PADDING_REL_TOL, model=spec.to_dict(), values=[a, b])
    return outcome


CHECKS: dict[str, Callable[[random.Random, int], CheckOutcome]] = {
    "pipeline_vs_determinant": check_pipeline,
    "toda_residuals": check_toda_residuals,
    "information_matrix": check_information_matrix,
    "determinant_forms": check_determinant_forms,
    "round_trips": check_round_trips,
    "padding_independence": check_padding,
}


def run_checks(
    instances: int = 100, seed: int = 0, only: list[str] | None = None
) -> CheckReport:
    """Run the selected checks (all by default), each on `instances` random cases."""
    if instances < 1:
        raise InvalidInputError(f"instances must be positive, got {instances}")
    names = only or list(CHECKS)
    unknown = [n for n in names if n not in CHECKS]
    if unknown:
        raise InvalidInputError(
            f"Unknown check(s): {', '.join(unknown)}", details={"available": list(CHECKS)}
        )
    report = CheckReport(seed, instances)
    for name in names:
        rng = random.Random(f"{seed}:{name}")
        started = time.perf_counter()
        outcome = CHECKS[name](rng, instances)
        outcome.seconds = time.perf_counter() - started
        logger.info(f"check {name}: {outcome.passed} passed, {outcome.failed} failed")
        report.outcomes.append(outcome)
    return report
