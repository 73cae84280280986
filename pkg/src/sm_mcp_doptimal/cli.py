"""Command-line interface.

    sm-mcp-doptimal solve   problem.json [--seed N] [--restarts N] [--out PATH]
    sm-mcp-doptimal robust  --m 2 --alpha 1 --d 0.5
    sm-mcp-doptimal maximin problem.json --pschedule=-1,-4,-16 --nodes 24
    sm-mcp-doptimal oracle  --m 3 --beta 2 --b 1 --grid 201 --mode rational
    sm-mcp-doptimal check   --instances 50
    sm-mcp-doptimal serve

Results are written as JSON to stdout (or --out); errors as JSON on stderr.
Exit codes: 0 success, 1 infeasible or degenerate, 2 invalid input.
"""

import argparse
import asyncio
import json
import logging
import sys
from pathlib import Path
from typing import Any

from .config import setup_logging
from .errors import EXIT_INFEASIBLE, EXIT_INVALID_INPUT, EXIT_OK, DesignError, InvalidInputError
from .problem import ProblemFile, ProblemKind, execute, read_document, spec_fields

logger = logging.getLogger(__name__)

COMMANDS = {
    "solve": ProblemKind.DOPT,
    "robust": ProblemKind.ROBUST,
    "maximin": ProblemKind.MAXIMIN,
    "oracle": ProblemKind.ORACLE,
    "check": ProblemKind.CHECK,
}


def _number_list(text: str) -> list[str]:
    """Comma-separated numbers, kept as text so "1/3" stays exact."""
    return [item.strip() for item in text.split(",") if item.strip()]


def _int_list(text: str) -> list[int]:
    try:
        return [int(item) for item in _number_list(text)]
    except ValueError as e:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from e


def _float_list(text: str) -> list[float]:
    try:
        return [float(item) for item in _number_list(text)]
    except ValueError as e:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from e


def _add_common(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("problem", nargs="?", help="problem JSON file")
    parser.add_argument("--spec", help="inline problem JSON instead of a file")
    parser.add_argument("--out", help="write the result JSON here instead of stdout")
    parser.add_argument("--seed", type=int, help="seed of the restart generator")
    parser.add_argument("--restarts", type=int, help="number of optimizer restarts")
    parser.add_argument("--workers", type=int, help="threads running restarts in parallel")
    parser.add_argument("--mode", choices=["float", "rational"], help="arithmetic backend")
    parser.add_argument("--log-level", help="DEBUG, INFO, WARNING or ERROR")


def _add_model(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--m", type=int, help="number of regression parameters")
    parser.add_argument("--beta", type=_number_list, help='prior roots, e.g. "2,3"')
    parser.add_argument("--b", type=_int_list, help='root multiplicities, e.g. "1,1"')


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="sm-mcp-doptimal",
        description="D-optimal designs through canonical moments and Toda recurrences",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("solve", help="D-optimal design for a weighted polynomial model")
    _add_common(p)
    _add_model(p)
    p.add_argument("--oracle-gap", action="store_true", help="compare with the grid search")
    p.add_argument("--grid", type=int, help="grid size for --oracle-gap")

    p = sub.add_parser("robust", help="robust design under a bias budget")
    _add_common(p)
    _add_model(p)
    p.add_argument("--alpha", type=int, help="contamination exponent")
    p.add_argument("--d", type=float, help="bias budget")

    p = sub.add_parser("maximin", help="maximin design along a power-mean schedule")
    _add_common(p)
    p.add_argument(
        "--pschedule", type=_float_list, help="negative exponents, written --pschedule=-1,-4,-16"
    )
    p.add_argument("--nodes", type=int, help="Gauss-Legendre nodes per axis")

    p = sub.add_parser("oracle", help="grid exchange search (slow reference)")
    _add_common(p)
    _add_model(p)
    p.add_argument("--grid", type=int, help="number of grid points on [0,1]")

    p = sub.add_parser("check", help="run the invariant suite on random instances")
    _add_common(p)
    p.add_argument("--instances", type=int, help="random instances per check")
    p.add_argument("--only", type=_number_list, help="comma-separated check names")

    p = sub.add_parser("serve", help="run the MCP server on stdio")
    p.add_argument("--log-level", help="DEBUG, INFO, WARNING or ERROR")
    return parser


def _document(args: argparse.Namespace) -> dict[str, Any]:
    """Problem document from the file or --spec, with inline flags applied to its spec."""
    if args.problem and args.spec:
        raise InvalidInputError("give either a problem file or --spec, not both")
    if args.problem:
        data = read_document(args.problem)
    elif args.spec:
        try:
            data = json.loads(args.spec)
        except json.JSONDecodeError as e:
            raise InvalidInputError(f"--spec is not valid JSON: {e.msg}") from e
    else:
        data = {}
    if not isinstance(data, dict):
        raise InvalidInputError("a problem document must be a JSON object")

    spec = spec_fields(data)
    if not isinstance(spec, dict):
        raise InvalidInputError("spec must be a JSON object")
    spec = dict(spec)
    inline = {
        "m": getattr(args, "m", None),
        "beta": getattr(args, "beta", None),
        "b": getattr(args, "b", None),
        "alpha": getattr(args, "alpha", None),
        "d": getattr(args, "d", None),
        "p_schedule": getattr(args, "pschedule", None),
        "nodes": getattr(args, "nodes", None),
        "instances": getattr(args, "instances", None),
        "checks": getattr(args, "only", None),
    }
    spec.update({k: v for k, v in inline.items() if v is not None})
    document = {"spec": spec, "options": data.get("options") or {}}
    if "kind" in data:
        document["kind"] = data["kind"]
    if args.mode or "mode" in data:
        document["mode"] = args.mode or data["mode"]
    return document


def _overrides(args: argparse.Namespace) -> dict[str, Any]:
    return {
        "seed": args.seed,
        "restarts": args.restarts,
        "workers": args.workers,
        "grid_size": getattr(args, "grid", None),
        "oracle_gap": True if getattr(args, "oracle_gap", False) else None,
    }


def _write(result: dict[str, Any], out: str | None) -> None:
    text = json.dumps(result, indent=2)
    if out:
        Path(out).write_text(text + "\n")
        logger.info(f"result written to {out}")
    else:
        sys.stdout.write(text + "\n")


def run(argv: list[str] | None = None) -> int:
    """Parse argv, run the command and return the process exit code."""
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return EXIT_OK if e.code == 0 else EXIT_INVALID_INPUT
    setup_logging(args.log_level)

    if args.command == "serve":
        from .server import DesignMCPServer

        asyncio.run(DesignMCPServer().run())
        return EXIT_OK

    try:
        problem = ProblemFile.from_dict(_document(args), COMMANDS[args.command])
        result = execute(problem, _overrides(args))
        _write(result, args.out)
    except DesignError as e:
        logger.debug(f"{e.code}: {e.message}")
        sys.stderr.write(json.dumps(e.to_dict()) + "\n")
        return e.exit_code
    except OSError as e:
        sys.stderr.write(json.dumps({"error": "InvalidInput", "message": str(e)}) + "\n")
        return EXIT_INVALID_INPUT

    if args.command == "check" and not result.get("ok", False):
        return EXIT_INFEASIBLE
    return EXIT_OK


def main() -> None:
    """Console entry point."""
    sys.exit(run())
