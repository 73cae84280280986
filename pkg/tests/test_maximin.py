"""Tests for the maximin design application."""

import math
from fractions import Fraction as F
from itertools import product

import numpy as np
import pytest
from scipy.integrate import dblquad

from sm_mcp_doptimal.apps.maximin import (
    MaximinSpec,
    build_cubature,
    gamma,
    min_gamma,
    p_mean_objective,
    power_mean,
    prior_density,
    psi_k,
    psi_values,
    solve_maximin,
)
from sm_mcp_doptimal.config import SolveOptions
from sm_mcp_doptimal.design.canonical import CanonicalSequence, canonical_to_moments
from sm_mcp_doptimal.design.oracle import GenHankelSpec, gen_hankel
from sm_mcp_doptimal.design.toda import ModelSpec, multiset_from_model, objective_depth
from sm_mcp_doptimal.errors import DesignError, InvalidInputError


@pytest.fixture
def quadratic_spec():
    """m = 2, g_0 = t, g_1 = t^2 on [1,2]^2."""
    return MaximinSpec(ModelSpec(2), ((0, 1), (0, 0, 1)), ((1, 2), (1, 2)), (-1, -4), 8)


@pytest.fixture
def two_point():
    return CanonicalSequence.from_values([F(1, 2), 1])


def test_psi_values_of_the_two_point_design(two_point):
    assert psi_values(two_point, ModelSpec(2), 2) == [1, F(1, 4)]
    assert psi_k(two_point, ModelSpec(2), 0) == 1
    assert psi_k(CanonicalSequence.from_values([F(1, 2), F(1, 2)]), ModelSpec(2), 1) == F(1, 8)
    with pytest.raises(InvalidInputError):
        psi_k(two_point, ModelSpec(2), -1)


def test_gamma_at_the_box_corners(quadratic_spec, two_point):
    assert gamma(two_point, quadratic_spec, [1, 1]) == pytest.approx(2.0)
    assert gamma(two_point, quadratic_spec, [2, 2]) == pytest.approx(5.0)
    assert min_gamma(two_point, quadratic_spec) == pytest.approx(2.0)
    with pytest.raises(InvalidInputError):
        gamma(two_point, quadratic_spec, [0.5, 1])


def test_linear_targets_make_gamma_constant(two_point):
    spec = MaximinSpec(ModelSpec(2), ((0, 1), (3, 1)), ((0, 1), (-1, 1)))
    assert gamma(two_point, spec, [0.2, -0.7]) == pytest.approx(1.25)
    assert power_mean(two_point, spec, -8.0) == pytest.approx(1.25)


def test_power_mean_lies_between_min_and_max(quadratic_spec, two_point):
    means = [power_mean(two_point, quadratic_spec, p) for p in (-1.0, -4.0, -16.0, -1000.0)]
    assert all(2.0 < v < 5.0 for v in means)
    assert means == sorted(means, reverse=True)
    assert means[-1] == pytest.approx(2.0, rel=0.05)


def test_p_mean_objective_normalization(quadratic_spec, two_point):
    cub = build_cubature(quadratic_spec)
    value = p_mean_objective(two_point, quadratic_spec, -1.0)
    assert (value / cub.total) ** -1.0 == pytest.approx(
        power_mean(two_point, quadratic_spec, -1.0)
    )
    with pytest.raises(InvalidInputError):
        p_mean_objective(two_point, quadratic_spec, 0.5)


def test_prior_density_follows_the_squared_slope(quadratic_spec):
    theta = np.array([1.0, 1.5, 2.0])
    assert prior_density(quadratic_spec, 0, theta).tolist() == [1.0, 1.0, 1.0]
    assert prior_density(quadratic_spec, 1, theta).tolist() == [8.0, 12.0, 16.0]


def test_negative_prior_density_is_rejected():
    spec = MaximinSpec(ModelSpec(1), ((0, 0, 0, 1),), ((-2, -1),))
    with pytest.raises(InvalidInputError):
        build_cubature(spec)


@pytest.mark.parametrize(
    "kwargs",
    [
        {"p_schedule": ()},
        {"p_schedule": (-1, 2)},
        {"p_schedule": (-4, -1)},
        {"p_schedule": (-1, -1)},
        {"nodes": 0},
        {"theta_box": ((1, 2), (2, 1))},
        {"g": ((0, 1),)},
    ],
)
def test_spec_validation(kwargs):
    fields = {"g": ((0, 1), (0, 0, 1)), "theta_box": ((1, 2), (1, 2))} | kwargs
    with pytest.raises(InvalidInputError):
        MaximinSpec(ModelSpec(2), **fields)


def test_from_dict_defaults():
    spec = MaximinSpec.from_dict({"m": 2, "g": [[0, 1], [0, 0, 1]], "theta_box": [[1, 2], [1, 2]]})
    assert spec.p_schedule == (-1.0, -2.0, -4.0, -8.0, -16.0, -32.0)
    assert spec.nodes == 16
    assert spec.to_dict()["g"] == [[0.0, 1.0], [0.0, 0.0, 1.0]]
    with pytest.raises(InvalidInputError):
        MaximinSpec.from_dict({"m": 2, "g": [[0, 1], [0, 0, 1]]})


@pytest.mark.slow
def test_homotopy_reaches_the_maximin_design(quadratic_spec):
    path = solve_maximin(quadratic_spec, SolveOptions(restarts=2, seed=0))
    assert [stage.diagnostics["pexp"] for stage in path] == [-1.0, -4.0]
    for stage in path:
        assert stage.diagnostics["min_gamma"] == pytest.approx(2.0, abs=1e-4)
    final = path[-1].measure
    assert final.support == pytest.approx((0.0, 1.0), abs=1e-6)
    assert final.weights == pytest.approx((0.5, 0.5), abs=1e-3)


@pytest.mark.parametrize("pexp", [-1.0, -4.0])
def test_cubature_matches_adaptive_quadrature(quadratic_spec, pexp):
    p = CanonicalSequence.from_values([0.5, 1.0])
    expected, _ = dblquad(
        lambda y, x: gamma(p, quadratic_spec, [x, y]) ** pexp * 8 * y, 1, 2, 1, 2
    )
    assert p_mean_objective(p, quadratic_spec, pexp) == pytest.approx(expected, rel=1e-7)
    if pexp == -1.0:
        assert expected == pytest.approx(4 * math.log(2.5), rel=1e-9)


def _psi_by_determinants(p: CanonicalSequence, model: ModelSpec) -> list[float]:
    c = canonical_to_moments(p, objective_depth(model))
    T = multiset_from_model(model)
    h = [float(gen_hankel(c, GenHankelSpec(T, k))) for k in range(model.m + 1)]
    return [h[k + 1] / h[k] for k in range(model.m)]


def _grid_maximin(model: ModelSpec, floors: list[float], levels: int = 6) -> float:
    """max over p of sum_k floors[k] psi_k, by a coarse grid followed by local zooms."""
    dim = objective_depth(model)

    def score(x) -> float:
        try:
            psi = _psi_by_determinants(CanonicalSequence(tuple(x)), model)
        except DesignError:
            return -math.inf
        return sum(a * v for a, v in zip(floors, psi))

    best = max(product(np.linspace(0.01, 0.99, 5), repeat=dim), key=score)
    step = 0.245
    for _ in range(levels):
        step /= 2
        axes = [np.clip([x - step, x, x + step], 0.001, 0.999) for x in best]
        best = max(product(*axes), key=score)
    return score(best)


@pytest.mark.slow
def test_homotopy_with_a_prior_approaches_the_grid_maximin():
    model = ModelSpec(3, (2.0,), (1,))
    spec = MaximinSpec(
        model, ((0, 1), (0, 0, 1), (0, 0, 0, 1 / 3)), ((1, 2),) * 3, (-1, -4, -16, -64), 8
    )
    # squared slopes 1, 4 theta^2 and theta^4 are smallest at theta = 1
    oracle = _grid_maximin(model, [1.0, 4.0, 1.0])
    path = solve_maximin(spec, SolveOptions(restarts=4, seed=0))
    assert path[-1].diagnostics["min_gamma"] >= 0.95 * oracle
