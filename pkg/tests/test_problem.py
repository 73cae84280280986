"""Tests for problem documents."""

import json
from fractions import Fraction

import pytest

from sm_mcp_doptimal.apps.robust import RobustSpec
from sm_mcp_doptimal.design.toda import ModelSpec
from sm_mcp_doptimal.errors import InvalidInputError
from sm_mcp_doptimal.numeric import Mode
from sm_mcp_doptimal.problem import CheckSpec, ProblemFile, ProblemKind, execute


def test_nested_and_flat_documents_agree():
    nested = ProblemFile.from_dict({"kind": "dopt", "spec": {"m": 3, "beta": [2], "b": [1]}})
    flat = ProblemFile.from_dict({"kind": "dopt", "m": 3, "beta": [2], "b": [1]})
    assert nested.payload == flat.payload == ModelSpec(3, (2.0,), (1,))
    assert nested.kind is ProblemKind.DOPT


def test_rational_mode_keeps_exact_roots():
    problem = ProblemFile.from_dict({"m": 2, "beta": ["3/2"], "b": [1], "mode": "rational"}, "dopt")
    assert problem.mode is Mode.RATIONAL
    assert problem.to_dict()["spec"]["beta"] == ["3/2"]


def test_kind_must_match_the_command():
    with pytest.raises(InvalidInputError, match="does not match"):
        ProblemFile.from_dict({"kind": "robust", "m": 2}, ProblemKind.DOPT)
    with pytest.raises(InvalidInputError, match="unknown problem kind"):
        ProblemFile.from_dict({"kind": "fit", "m": 2})
    with pytest.raises(InvalidInputError, match="no 'kind'"):
        ProblemFile.from_dict({"m": 2})


def test_robust_and_check_payloads():
    robust = ProblemFile.from_dict({"m": 2, "alpha": 1, "d": 0.5}, "robust")
    assert robust.payload == RobustSpec(2, 1, 0.5)
    check = ProblemFile.from_dict({"instances": 5, "checks": ["round_trips"]}, "check")
    assert check.payload == CheckSpec(5, ("round_trips",))
    with pytest.raises(InvalidInputError):
        ProblemFile.from_dict({"m": 2, "alpha": 1}, "robust")
    with pytest.raises(InvalidInputError):
        ProblemFile.from_dict({"instances": 0}, "check")


def test_load_from_file(tmp_path):
    path = tmp_path / "problem.json"
    path.write_text(json.dumps({"kind": "oracle", "spec": {"m": 2}, "options": {"grid_size": 11}}))
    problem = ProblemFile.load(path)
    assert problem.kind is ProblemKind.ORACLE
    assert problem.solve_options().grid_size == 11

    path.write_text("{not json")
    with pytest.raises(InvalidInputError, match="not valid JSON"):
        ProblemFile.load(path)
    with pytest.raises(InvalidInputError, match="cannot read"):
        ProblemFile.load(tmp_path / "missing.json")


def test_option_precedence(monkeypatch):
    monkeypatch.setenv("SM_DOPT_RESTARTS", "3")
    monkeypatch.setenv("SM_DOPT_SEED", "9")
    problem = ProblemFile.from_dict({"m": 2, "options": {"seed": 4}}, "dopt")
    opts = problem.solve_options({"workers": 2, "restarts": None})
    assert (opts.restarts, opts.seed, opts.workers) == (3, 4, 2)


def test_unknown_option_is_rejected():
    problem = ProblemFile.from_dict({"m": 2, "options": {"restart": 3}}, "dopt")
    with pytest.raises(InvalidInputError):
        problem.solve_options()


def test_execute_oracle_in_rational_mode():
    problem = ProblemFile.from_dict(
        {"m": 2, "options": {"grid_size": 11}, "mode": "rational"}, "oracle"
    )
    result = execute(problem)
    assert result["design"]["support"] == pytest.approx([0.0, 1.0])
    assert float(Fraction(result["diagnostics"]["exact_determinant"])) == pytest.approx(0.25)
    assert result["diagnostics"]["grid_size"] == 11


def test_execute_check():
    problem = ProblemFile.from_dict({"instances": 2, "checks": ["information_matrix"]}, "check")
    result = execute(problem)
    assert result["ok"] is True
    assert result["checks"]["information_matrix"]["passed"] == 2
