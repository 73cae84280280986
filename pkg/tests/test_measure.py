"""Tests for design measures and moments."""

from fractions import Fraction as F

import pytest

from sm_mcp_doptimal.design.measure import (
    DesignMeasure,
    Domain,
    MomentSequence,
    desymmetrize,
    is_symmetric,
    moments,
    symmetrize,
    to_symmetric_interval,
    to_unit_interval,
)
from sm_mcp_doptimal.errors import AsymmetricInputError, InvalidInputError
from sm_mcp_doptimal.numeric import Mode


def test_moments_of_three_point_measure(three_point):
    c = moments(three_point, 4)
    assert c.values == (1, F(1, 2), F(5, 12), F(3, 8), F(17, 48))
    assert c.mode is Mode.RATIONAL
    assert c.order == 4


def test_atoms_are_sorted_and_merged():
    mu = DesignMeasure(Domain.UNIT, (0.5, 0.1, 0.5 + 1e-12), (0.25, 0.5, 0.25))
    assert mu.support == pytest.approx((0.1, 0.5))
    assert mu.weights == pytest.approx((0.5, 0.5))


def test_float_atoms_past_the_boundary_are_clamped():
    mu = DesignMeasure(Domain.UNIT, (-1e-12, 1 + 1e-12), (0.5, 0.5))
    assert mu.support == (0.0, 1.0)


def test_rational_atoms_are_checked_exactly():
    tiny = F(1, 10**12)
    with pytest.raises(InvalidInputError):
        DesignMeasure(Domain.UNIT, (F(0), 1 + tiny), (F(1, 2), F(1, 2)), Mode.RATIONAL)
    with pytest.raises(InvalidInputError):
        DesignMeasure(Domain.SYMMETRIC, (-1 - tiny, F(1)), (F(1, 2), F(1, 2)), Mode.RATIONAL)


def test_rational_atoms_merge_only_when_equal():
    half = F(1, 2)
    mu = DesignMeasure(
        Domain.UNIT, (half, half + F(1, 10**12), half), (F(1, 4), F(1, 4), F(1, 2)), Mode.RATIONAL
    )
    assert mu.support == (half, half + F(1, 10**12))
    assert mu.weights == (F(3, 4), F(1, 4))


@pytest.mark.parametrize(
    "support, weights",
    [
        ((0.2, 1.5), (0.5, 0.5)),
        ((0.2, 0.4), (0.5, 0.6)),
        ((0.2, 0.4), (1.0, 0.0)),
        ((0.2,), (0.5, 0.5)),
        ((), ()),
    ],
)
def test_invalid_measures_are_rejected(support, weights):
    with pytest.raises(InvalidInputError):
        DesignMeasure(Domain.UNIT, support, weights)


def test_rational_weights_must_sum_exactly_to_one():
    with pytest.raises(InvalidInputError):
        DesignMeasure(Domain.UNIT, (F(0), F(1)), (F(1, 3), F(1, 3)), Mode.RATIONAL)


def test_moment_sequence_requires_unit_mass():
    with pytest.raises(InvalidInputError):
        MomentSequence.of([F(1, 2), F(1, 4)])


def test_symmetrize_and_back_are_exact():
    mu = DesignMeasure(Domain.UNIT, (F(1, 4), F(1)), (F(1, 2), F(1, 2)), Mode.RATIONAL)
    xi = symmetrize(mu)
    assert xi.domain is Domain.SYMMETRIC
    assert xi.support == (-1, F(-1, 2), F(1, 2), 1)
    assert xi.weights == (F(1, 4),) * 4
    assert is_symmetric(xi)
    assert desymmetrize(xi) == mu


def test_symmetrize_keeps_an_atom_at_the_origin():
    mu = DesignMeasure(Domain.UNIT, (F(0), F(1)), (F(1, 2), F(1, 2)), Mode.RATIONAL)
    xi = symmetrize(mu)
    assert xi.support == (-1, 0, 1)
    assert xi.weights == (F(1, 4), F(1, 2), F(1, 4))


def test_symmetrize_falls_back_to_float_for_irrational_roots():
    mu = DesignMeasure(Domain.UNIT, (F(1, 2),), (F(1),), Mode.RATIONAL)
    xi = symmetrize(mu)
    assert xi.mode is Mode.FLOAT
    assert xi.support == pytest.approx((-(0.5**0.5), 0.5**0.5))


def test_desymmetrize_rejects_asymmetric_designs():
    xi = DesignMeasure(Domain.SYMMETRIC, (-0.5, 1.0), (0.5, 0.5))
    with pytest.raises(AsymmetricInputError):
        desymmetrize(xi)


def test_affine_transport_round_trip(three_point):
    xi = to_symmetric_interval(three_point)
    assert xi.support == (-1, 0, 1)
    assert to_unit_interval(xi) == three_point


def test_dict_round_trip_keeps_exact_values(three_point):
    data = three_point.to_dict()
    assert data["weights"] == ["1/3", "1/3", "1/3"]
    assert DesignMeasure.from_dict(data) == three_point
