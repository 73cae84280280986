"""Tests for generalized moments and the Toda evaluation."""

from fractions import Fraction as F

import pytest

from sm_mcp_doptimal.checks import random_rational_measure
from sm_mcp_doptimal.design.canonical import CanonicalSequence, hankel_product, moments_to_canonical
from sm_mcp_doptimal.design.measure import moments
from sm_mcp_doptimal.design.oracle import gen_zeta_table, multiset_hankel
from sm_mcp_doptimal.design.toda import (
    ModelSpec,
    PriorMultiset,
    ZetaTable,
    c0_propagate,
    evaluate_objective,
    gen_moments,
    hankel_ratio_from_table,
    initial_table,
    multiset_from_model,
    objective_depth,
    reparam_shift,
    toda_step,
    zeta_chain,
)
from sm_mcp_doptimal.errors import DegenerateStepError, InsufficientMomentsError, InvalidInputError


def test_multiset_merges_and_orders():
    T = PriorMultiset.of([(F(3), 1), (F(-1), 2), (F(3), 1)])
    assert T.size == 4
    assert T.multiplicity(F(3)) == 2
    assert T.elements() == [-1, -1, 3, 3]
    assert T.union([F(0)]).elements() == [-1, -1, 0, 3, 3]


def test_multiset_rejects_bad_multiplicity():
    with pytest.raises(InvalidInputError):
        PriorMultiset(((F(1), 0),))


def test_model_spec_validation():
    spec = ModelSpec(3, (F(2), F(-1)), (1, 2))
    assert spec.S == 3
    assert objective_depth(spec) == 10
    assert multiset_from_model(spec).entries == ((2, 2), (-1, 4))
    with pytest.raises(InvalidInputError):
        ModelSpec(0)
    with pytest.raises(InvalidInputError):
        ModelSpec(2, (F(2),), ())
    with pytest.raises(InvalidInputError):
        ModelSpec(2, (F(2), F(2)), (1, 1))


def test_gen_moments_applies_each_factor(three_point):
    c = moments(three_point, 4)
    shifted = gen_moments(c, PriorMultiset.from_elements([F(2)]))
    assert shifted == tuple(c[k + 1] - 2 * c[k] for k in range(4))
    with pytest.raises(InsufficientMomentsError):
        gen_moments(c, PriorMultiset.of({F(2): 5}))


def test_objective_without_prior_is_the_hankel_product(three_point):
    p = moments_to_canonical(moments(three_point, 6))
    assert evaluate_objective(p, ModelSpec(3)) == hankel_product(p, 3) == F(1, 432)


@pytest.mark.parametrize(
    "beta, b",
    [((F(2),), (1,)), ((F(-1),), (1,)), ((F(2), F(3)), (1, 1)), ((F(1, 3),), (2,))],
)
def test_objective_matches_determinant(three_point, beta, b):
    spec = ModelSpec(3, beta, b)
    c = moments(three_point, objective_depth(spec) + 1)
    p = moments_to_canonical(moments(three_point, 6))
    assert evaluate_objective(p, spec) == multiset_hankel(c, spec)


def test_objective_on_random_measures(rng):
    for _ in range(25):
        mu = random_rational_measure(rng)
        spec = ModelSpec(rng.choice([2, 3]), (F(2),), (1,))
        c = moments(mu, objective_depth(spec))
        p = moments_to_canonical(moments(mu, 2 * len(mu)))
        assert evaluate_objective(p, spec) == multiset_hankel(c, spec)


def test_float_objective_is_close(three_point):
    spec = ModelSpec(3, (F(2),), (1,))
    exact = evaluate_objective(moments_to_canonical(moments(three_point, 6)), spec)
    approx = evaluate_objective(CanonicalSequence.from_values([0.5, 2 / 3, 0.5, 1.0]), spec)
    assert approx == pytest.approx(float(exact), rel=1e-10)


def test_shift_and_toda_step_agree_with_determinants(rng):
    mu = random_rational_measure(rng, max_atoms=6, min_atoms=6)
    T = PriorMultiset.of({F(2): 2})
    c = moments(mu, 16)
    start = gen_zeta_table(c, T, F(-1), 4)

    shifted = reparam_shift(start, F(3))
    assert len(shifted) == 4
    assert shifted.zetas == gen_zeta_table(c, T, F(3), 4).zetas

    stepped = toda_step(start, F(3))
    expected = gen_zeta_table(c, T.union([F(-1)]), F(3), 3)
    assert len(stepped) == 3
    assert stepped.zetas == expected.zetas
    assert stepped.c0 == start.zetas[0] * start.c0 == expected.c0
    assert stepped.stage.elements() == [-1, 2, 2]


def test_chain_reaches_stage_at_zero_shift(three_point):
    T = PriorMultiset.of({F(2): 2})
    p = moments_to_canonical(moments(three_point, 6))
    table = zeta_chain(p, T, 4)
    assert table.shift == 0
    assert table.stage.elements() == [2, 2]
    assert table.c0 == gen_moments(moments(three_point, 3), T)[0]
    assert table.zetas == gen_zeta_table(moments(three_point, 10), T, 0, 4).zetas


def test_hankel_ratio_is_c0_at_zero_size():
    table = initial_table(CanonicalSequence.from_values([F(1, 2), 1]), 2)
    assert hankel_ratio_from_table(table, 0) == 1
    assert hankel_ratio_from_table(table, 1) == F(1, 4)


def test_padding_does_not_change_objective():
    spec = ModelSpec(2, (2.0,), (1,))
    base = [0.3, 0.6, 0.45, 0.7]
    a = evaluate_objective(CanonicalSequence.from_values(base + [0.2]), spec)
    b = evaluate_objective(CanonicalSequence.from_values(base + [0.9, 0.1]), spec)
    assert a == b


def test_c0_propagate_multiplies_by_the_first_zeta():
    assert c0_propagate(F(1, 2), F(1, 3)) == F(1, 6)
    assert c0_propagate(F(5, 7), 0) == 0


def test_small_but_well_conditioned_factors_pass_the_sweep():
    table = ZetaTable(PriorMultiset(), 0.0, (1e-14, 2e-14, 3e-14), 1.0)
    swept = reparam_shift(table, 0.0)
    assert swept.zetas == pytest.approx(table.zetas, rel=1e-12)


def test_cancelled_denominator_is_degenerate():
    table = ZetaTable(PriorMultiset(), 0.0, (0.5, 0.5, 0.25), 1.0)
    with pytest.raises(DegenerateStepError):
        reparam_shift(table, 0.5)
