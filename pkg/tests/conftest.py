"""Shared fixtures."""

import random
from fractions import Fraction

import pytest

from sm_mcp_doptimal.config import SolveOptions
from sm_mcp_doptimal.design.measure import DesignMeasure, Domain
from sm_mcp_doptimal.numeric import Mode

F = Fraction


@pytest.fixture
def three_point() -> DesignMeasure:
    """Mass 1/3 at 0, 1/2 and 1: canonical moments (1/2, 2/3, 1/2, 1)."""
    return DesignMeasure(Domain.UNIT, (F(0), F(1, 2), F(1)), (F(1, 3),) * 3, Mode.RATIONAL)


@pytest.fixture
def rng() -> random.Random:
    return random.Random(20240611)


@pytest.fixture
def fast_options() -> SolveOptions:
    return SolveOptions(restarts=2, seed=3)
