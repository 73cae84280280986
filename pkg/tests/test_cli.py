"""Tests for the command-line interface."""

import json

import pytest

from sm_mcp_doptimal.cli import build_parser, run


def _last_json_line(text: str) -> dict:
    return json.loads(text.strip().splitlines()[-1])


def test_solve_writes_the_result_file(tmp_path):
    out = tmp_path / "result.json"
    assert run(["solve", "--m", "2", "--restarts", "2", "--out", str(out)]) == 0
    result = json.loads(out.read_text())
    assert result["design"]["support"] == pytest.approx([0.0, 1.0], abs=1e-6)
    assert result["objective"] == pytest.approx(0.25, rel=1e-6)


def test_problem_file_with_flag_overrides(tmp_path, capsys):
    path = tmp_path / "problem.json"
    path.write_text(json.dumps({"kind": "oracle", "spec": {"m": 3}, "options": {"grid_size": 5}}))
    assert run(["oracle", str(path), "--m", "2"]) == 0
    result = json.loads(capsys.readouterr().out)
    assert result["design"]["support"] == pytest.approx([0.0, 1.0])
    assert result["diagnostics"]["grid_size"] == 5


def test_invalid_model_exits_with_code_two(capsys):
    assert run(["solve", "--m", "0"]) == 2
    error = _last_json_line(capsys.readouterr().err)
    assert error["error"] == "InvalidInput"


def test_mismatched_prior_lists(capsys):
    assert run(["solve", "--m", "2", "--beta", "2", "--b", "1,2"]) == 2
    assert _last_json_line(capsys.readouterr().err)["error"] == "InvalidInput"


def test_file_and_inline_spec_are_exclusive(tmp_path, capsys):
    path = tmp_path / "problem.json"
    path.write_text("{}")
    assert run(["solve", str(path), "--spec", '{"m": 2}']) == 2
    assert "not both" in _last_json_line(capsys.readouterr().err)["message"]


def test_unknown_command_is_invalid_input():
    assert run(["fit"]) == 2


def test_check_command(capsys):
    assert run(["check", "--instances", "3", "--only", "round_trips,information_matrix"]) == 0
    report = json.loads(capsys.readouterr().out)
    assert report["ok"] is True
    assert set(report["checks"]) == {"round_trips", "information_matrix"}


def test_schedule_flag_takes_negative_numbers():
    args = build_parser().parse_args(["maximin", "--pschedule=-1,-4,-16", "--nodes", "8"])
    assert args.pschedule == [-1.0, -4.0, -16.0]
    assert args.nodes == 8
