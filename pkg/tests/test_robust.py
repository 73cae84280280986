"""Tests for the robust design application."""

from fractions import Fraction as F
from itertools import product
from math import prod

import pytest

from sm_mcp_doptimal.apps.robust import (
    RobustSpec,
    polynomial_bias,
    robust_constraint,
    s_recursion,
    s_table,
    solve_robust,
    symmetric_canonical,
    symmetric_objective,
)
from sm_mcp_doptimal.config import SolveOptions
from sm_mcp_doptimal.design.canonical import CanonicalSequence, moments_to_canonical
from sm_mcp_doptimal.design.measure import DesignMeasure, Domain, desymmetrize, moments
from sm_mcp_doptimal.design.oracle import sign_pattern_sup
from sm_mcp_doptimal.errors import InfeasibleBudgetError, InvalidInputError
from sm_mcp_doptimal.numeric import Mode

ZETAS = (F(1, 2), F(1, 3), F(1, 5), F(1, 7), F(1, 11), F(1, 13))


def test_s_recursion_small_cases():
    z1, z2, z3 = ZETAS[:3]
    assert s_recursion(ZETAS, 0, 4) == 1
    assert s_recursion(ZETAS, 2, 1) == 0
    assert s_recursion(ZETAS, 1, 3) == z1 + z2 + z3
    assert s_recursion(ZETAS, 2, 2) == z1 * (z1 + z2)
    assert s_recursion(ZETAS, 2, 3) == F(137, 180)


def _lattice_sum(zetas, i, j):
    """S_{i,j} expanded into monomials zeta_{k_1} ... zeta_{k_i}.

    Indices satisfy 1 <= k_r <= j - r + 1 and k_{r-1} <= k_r + 1.
    """
    total = F(0)
    for ks in product(*(range(1, j - r + 2) for r in range(1, i + 1))):
        if ks[-1] > j - i + 1:
            continue
        if all(ks[r - 1] <= ks[r] + 1 for r in range(1, i)):
            total += prod(zetas[k - 1] for k in ks)
    return total


def test_s_recursion_matches_the_monomial_expansion():
    for i in range(1, 7):
        for j in range(i, 7):
            assert s_recursion(ZETAS, i, j) == _lattice_sum(ZETAS, i, j), (i, j)


def test_s_table_rows_match_single_entries():
    table = s_table(ZETAS, 3, 6)
    for i in range(4):
        for j in range(i, 7):
            assert table[i][j] == s_recursion(ZETAS, i, j)


def test_spec_validation_and_ranges():
    spec = RobustSpec(3, 2, 0.5, (F(1, 2),), (1,))
    assert spec.summation_range == range(2, 3)
    assert spec.objective_depth() == 4
    assert spec.constraint_depth() == 6
    assert spec.symmetric_multiset().elements() == [F(-1, 2)] * 2 + [F(1, 2)] * 2
    assert spec.squared_multiset().entries == ((F(1, 4), 2),)
    assert RobustSpec(1, 0, 1.0).summation_range == range(1, 1)
    with pytest.raises(InvalidInputError):
        RobustSpec(2, 0, 0.0)
    with pytest.raises(InvalidInputError):
        RobustSpec(2, -1, 1.0)
    with pytest.raises(InvalidInputError):
        RobustSpec(2, 0, 1.0, (F(-1, 2),), (1,))


def test_symmetric_canonical_interleaves_one_half():
    q = CanonicalSequence.from_values([F(1, 3), 1])
    assert symmetric_canonical(q).values == (F(1, 2), F(1, 3), F(1, 2), 1)


def test_objective_and_constraint_in_closed_form():
    spec = RobustSpec(2, 0, 1.0)
    q = CanonicalSequence.from_values([F(1, 2), 1])
    assert symmetric_objective(q, spec) == F(1, 2)
    assert robust_constraint(q, spec) == F(1, 4)


def test_constraint_matches_the_bias_of_a_two_point_design():
    xi = DesignMeasure(Domain.SYMMETRIC, (F(-1, 2), F(1, 2)), (F(1, 2), F(1, 2)), Mode.RATIONAL)
    spec = RobustSpec(2, 1, 1.0)
    q = moments_to_canonical(moments(desymmetrize(xi), 4))
    assert robust_constraint(q, spec) == F(1, 64)
    assert polynomial_bias(xi, spec) == F(1, 64)
    assert sign_pattern_sup(xi, 2, 1) == F(1, 64)


def test_bias_never_exceeds_the_sign_pattern_sup():
    xi = DesignMeasure(
        Domain.SYMMETRIC,
        (F(-1), F(-1, 3), F(1, 3), F(1)),
        (F(1, 8), F(3, 8), F(3, 8), F(1, 8)),
        Mode.RATIONAL,
    )
    for m, alpha in [(1, 1), (2, 0), (2, 1), (3, 1)]:
        spec = RobustSpec(m, alpha, 1.0)
        q = moments_to_canonical(moments(desymmetrize(xi), 6))
        bias = polynomial_bias(xi, spec)
        assert robust_constraint(q, spec) == bias
        assert bias <= sign_pattern_sup(xi, m, alpha)


def test_empty_summation_range_gives_zero():
    q = CanonicalSequence.from_values([F(1, 2), 1])
    assert robust_constraint(q, RobustSpec(1, 0, 1.0)) == 0


@pytest.mark.slow
def test_large_budget_recovers_the_unconstrained_design():
    result = solve_robust(RobustSpec(2, 0, 1e6), SolveOptions(restarts=2, seed=0))
    assert result.objective == pytest.approx(1.0, rel=1e-4)
    assert result.measure.domain is Domain.SYMMETRIC
    assert result.measure.support == pytest.approx((-1.0, 1.0), abs=1e-6)


@pytest.mark.slow
def test_budget_limits_the_variance():
    result = solve_robust(RobustSpec(2, 0, 0.25), SolveOptions(restarts=3, seed=0))
    assert result.objective == pytest.approx(0.5, abs=1e-3)
    assert result.diagnostics["constraint"] <= 0.25


def test_unreachable_budget_is_infeasible():
    # the bias q_1^2 never drops below margin^2
    spec = RobustSpec(1, 1, 1e-30)
    with pytest.raises(InfeasibleBudgetError):
        solve_robust(spec, SolveOptions(restarts=1, seed=0, max_iters=200))
