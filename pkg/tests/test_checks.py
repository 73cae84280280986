"""Tests for the invariant suite."""

import random

import pytest

from sm_mcp_doptimal.checks import CHECKS, random_model, random_rational_measure, run_checks
from sm_mcp_doptimal.errors import InvalidInputError


def test_suite_passes_on_a_small_run():
    report = run_checks(instances=10, seed=1)
    assert report.ok, report.to_dict()
    assert report.failed == 0
    assert report.passed == 10 * len(CHECKS)


def test_report_document():
    data = run_checks(instances=3, seed=0, only=["round_trips", "padding_independence"]).to_dict()
    assert data["ok"] is True
    assert list(data["checks"]) == ["round_trips", "padding_independence"]
    assert data["checks"]["round_trips"] == data["checks"]["round_trips"] | {
        "passed": 3,
        "failed": 0,
        "failures": [],
    }


def test_runs_are_reproducible():
    a = run_checks(instances=4, seed=7, only=["pipeline_vs_determinant"]).to_dict()
    b = run_checks(instances=4, seed=7, only=["pipeline_vs_determinant"]).to_dict()
    assert a["passed"] == b["passed"] == 4


def test_unknown_check_is_rejected():
    with pytest.raises(InvalidInputError) as exc:
        run_checks(instances=1, only=["no_such_check"])
    assert exc.value.details == {"available": list(CHECKS)}
    with pytest.raises(InvalidInputError):
        run_checks(instances=0)


def test_random_instances_are_valid():
    rng = random.Random(5)
    for _ in range(20):
        mu = random_rational_measure(rng, max_atoms=4)
        assert 1 <= len(mu) <= 4
        assert sum(mu.weights) == 1
        assert random_model(rng).m in (2, 3, 4)
