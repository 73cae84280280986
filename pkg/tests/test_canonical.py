"""Tests for canonical moments, zetas and Hankel determinants."""

import random
from fractions import Fraction as F

import pytest

from sm_mcp_doptimal.checks import random_float_canonical, random_rational_measure
from sm_mcp_doptimal.design.canonical import (
    CanonicalSequence,
    canonical_from_hankel_ratios,
    canonical_to_moments,
    canonical_to_zeta,
    check_moment_space,
    hankel,
    hankel_product,
    hankel_product_canonical,
    jacobi_coefficients,
    measure_to_canonical,
    moment_bounds,
    moments_to_canonical,
    zeta_from_hankel,
    zeta_to_canonical,
)
from sm_mcp_doptimal.design.measure import (
    DesignMeasure,
    Domain,
    MomentSequence,
    moments,
    symmetrize,
    to_unit_interval,
)
from sm_mcp_doptimal.design.optimize import reconstruct_design
from sm_mcp_doptimal.errors import (
    InsufficientDepthError,
    InvalidInputError,
    InvalidMomentSequenceError,
)
from sm_mcp_doptimal.numeric import Mode


def test_three_point_canonical_moments(three_point):
    p = moments_to_canonical(moments(three_point, 6))
    assert p.values == (F(1, 2), F(2, 3), F(1, 2), 1)
    assert p.terminates and p.terminal == 1


def test_hankel_ratio_path_agrees(three_point):
    c = moments(three_point, 4)
    assert canonical_from_hankel_ratios(c).values == moments_to_canonical(c).values


def test_moment_bounds_of_second_moment(three_point):
    c = moments(three_point, 4)
    assert moment_bounds(c, 1) == (0, 1)
    assert moment_bounds(c, 2) == (F(1, 4), F(1, 2))


def test_two_point_measure_moments():
    p = CanonicalSequence.from_values([F(1, 2), 1])
    assert canonical_to_moments(p, 3).values == (1, F(1, 2), F(1, 2), F(1, 2))


def test_canonical_to_moments_round_trip(three_point):
    c = moments(three_point, 7)
    assert canonical_to_moments(moments_to_canonical(c), 7) == c


def test_zeta_values_and_inverse(three_point):
    p = moments_to_canonical(moments(three_point, 4))
    z = canonical_to_zeta(p)
    assert z.values == (F(1, 2), F(1, 3), F(1, 6), F(1, 2))
    assert zeta_to_canonical(z).values == p.values


def test_zeta_from_hankel_matches(three_point):
    c = moments(three_point, 6)
    z = canonical_to_zeta(moments_to_canonical(c))
    for k in range(1, 4):
        assert zeta_from_hankel(c, k) == z[k - 1]


def test_hankel_product_forms(three_point):
    c = moments(three_point, 4)
    p = moments_to_canonical(c)
    assert hankel(c, 2) == F(1, 6)
    assert hankel(c, 3) == F(1, 432)
    assert hankel_product(p, 3) == F(1, 432)
    assert hankel_product_canonical(p, 3) == F(1, 432)
    assert hankel(c, 0) == 1


def test_jacobi_coefficients_of_two_point_measure():
    p = CanonicalSequence.from_values([F(1, 2), 1])
    alphas, betas = jacobi_coefficients(p, 2)
    assert alphas == [F(1, 2), F(1, 2)]
    assert betas == [F(1, 4)]


def test_float_terminal_snapping():
    p = CanonicalSequence.from_values([0.5, 1 - 1e-12])
    assert p.terminal == 1.0
    assert p.interior == (0.5,)
    assert p.mode is Mode.FLOAT


def test_truncated_cuts_at_first_terminal():
    p = CanonicalSequence.truncated([F(1, 3), 0, F(1, 2)])
    assert p.values == (F(1, 3), 0)


def test_interior_values_must_be_inside_the_interval():
    with pytest.raises(InvalidInputError):
        CanonicalSequence((F(1, 2), F(1)), None, Mode.RATIONAL)


def test_padding_needs_termination():
    p = CanonicalSequence.from_values([0.5, 0.5])
    with pytest.raises(InsufficientDepthError):
        p.padded(4)
    assert CanonicalSequence.from_values([0.5, 1.0]).padded(4)[2:] == (0.5, 0.5)


def test_outside_moment_space_is_rejected():
    c = MomentSequence.of([1, F(1, 2), F(1, 8)])
    assert not check_moment_space(c)
    with pytest.raises(InvalidMomentSequenceError):
        moments_to_canonical(c)


def test_float_design_canonical_moments():
    mu = DesignMeasure(Domain.UNIT, (0.0, 0.5, 1.0), (1 / 3, 1 / 3, 1 / 3))
    p = measure_to_canonical(mu)
    assert p.terminal == 1.0
    assert p.interior == pytest.approx((0.5, 2 / 3, 0.5), abs=1e-12)


def test_exact_design_goes_through_its_moments(three_point):
    assert measure_to_canonical(three_point) == moments_to_canonical(moments(three_point, 6))


def test_float_round_trip_through_the_design():
    rng = random.Random(17)
    for _ in range(300):
        q = random_float_canonical(rng, max_depth=8)
        recovered = measure_to_canonical(reconstruct_design(q))
        assert recovered.depth == q.depth
        assert recovered.terminal == q.terminal
        assert recovered.values == pytest.approx(q.values, abs=1e-7)


def test_symmetric_designs_have_odd_canonical_moments_one_half(rng):
    exact = DesignMeasure(
        Domain.UNIT, (F(0), F(1, 4), F(1)), (F(1, 4), F(1, 2), F(1, 4)), Mode.RATIONAL
    )
    p = measure_to_canonical(to_unit_interval(symmetrize(exact)))
    assert p.mode is Mode.RATIONAL
    assert all(v == F(1, 2) for v in p.values[::2])

    for _ in range(50):
        mu = random_rational_measure(rng, max_atoms=4)
        p = measure_to_canonical(to_unit_interval(symmetrize(mu)))
        assert p.depth % 2 == 0
        assert [float(v) for v in p.values[::2]] == pytest.approx([0.5] * (p.depth // 2), abs=1e-8)


def test_float_moments_slightly_past_the_boundary_are_clamped():
    p = moments_to_canonical(MomentSequence.of([1.0, 0.5, 0.5 + 1e-8]))
    assert p.values == (0.5, 1.0)
    with pytest.raises(InvalidMomentSequenceError):
        moments_to_canonical(MomentSequence.of([1.0, 0.5, 0.501]))
