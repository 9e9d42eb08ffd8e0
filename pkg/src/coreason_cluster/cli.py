# Copyright (c) 2025 CoReason, Inc.
#
# This software is proprietary and dual-licensed.
# Licensed under the Prosperity Public License 3.0 (the "License").
# A copy of the license is available at https://prosperitylicense.com/versions/3.0.0
# For details, see the LICENSE file.
# Commercial use beyond a 30-day trial requires a separate license.
#
# Source Code: https://github.com/CoReason-AI/coreason_cluster

"""
Command-line front end.

Reports are written to stdout as JSON with sorted keys, so identical inputs
give byte-identical output. Exit codes: 0 on success, 2 when a check fails,
1 on malformed input.
"""

import argparse
import json
import sys
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence

from pydantic import ValidationError

from .config import EngineConfig
from .engine import ClusterEngine
from .exceptions import ClusterError, NotFinite, ParseError
from .fixtures import fixture_names, load_matrix
from .matrix import format_matrix, parse_matrix, parse_quiver, principal_extension
from .models import ExtMatrix, KeyMode, MonomialMap, Move, TypeSpec
from .morphism import parse_map, verify_quasi_hom
from .seed import initial_seed, mutate_seed_path, relabel_seed
from .utils.logger import logger

EXIT_OK = 0
EXIT_INPUT = 1
EXIT_FAILED = 2


def _emit(payload: Any) -> None:
    sys.stdout.write(json.dumps(payload, sort_keys=True) + "\n")


def parse_path(text: Optional[str]) -> List[int]:
    """Reads ``k1,k2,...``; an empty or missing value is the empty path."""
    if not text:
        return []
    directions = []
    column = 1
    for token in text.split(","):
        stripped = token.strip()
        if not stripped.lstrip("-").isdigit():
            raise ParseError(f"expected a direction, got '{stripped}'", 1, column, "--path")
        directions.append(int(stripped))
        column += len(token) + 1
    return directions


def _load_matrix(args: argparse.Namespace) -> ExtMatrix:
    if args.matrix:
        return parse_matrix(Path(args.matrix).read_text(encoding="utf-8"), source=args.matrix)
    if args.quiver:
        return parse_quiver(Path(args.quiver).read_text(encoding="utf-8"), source=args.quiver)
    if args.type:
        return load_matrix(args.type)
    raise ParseError("one of --matrix, --quiver or --type is required", 1, 1, "arguments")


def _input(args: argparse.Namespace) -> ExtMatrix:
    b = _load_matrix(args)
    if getattr(args, "principal", False):
        b = principal_extension(b)
    return b


def _config(args: argparse.Namespace) -> EngineConfig:
    updates: Dict[str, Any] = {}
    for flag, field in (("cap", "cap"), ("trials", "trials"), ("rng_seed", "rng_seed")):
        value = getattr(args, flag, None)
        if value is not None:
            updates[field] = value
    return EngineConfig(**updates)


# --------------------------------------------------------------------------- commands


def _cmd_mutate(engine: ClusterEngine, args: argparse.Namespace) -> int:
    b = _input(args)
    mutated = engine.mutate(b, parse_path(args.path))
    if args.json:
        _emit({"n": mutated.n, "m": mutated.m, "matrix": [list(r) for r in mutated.entries]})
    else:
        sys.stdout.write(format_matrix(mutated))
    return EXIT_OK


def _cmd_graph(engine: ClusterEngine, args: argparse.Namespace) -> int:
    b = _input(args)
    mode = None if args.mode is None else KeyMode(args.mode)
    graph = engine.graph(b, mode)
    if args.dot:
        Path(args.dot).write_text(graph.to_dot(), encoding="utf-8")
    census = graph.census()
    _emit({**census.model_dump(), "mode": graph.mode.value, "regular": graph.is_regular()})
    return EXIT_OK


def _cmd_classify(engine: ClusterEngine, args: argparse.Namespace) -> int:
    b = _input(args)
    path = parse_path(args.path)
    relabel = parse_path(args.relabel) or None
    root = initial_seed(b)
    target = mutate_seed_path(root, path)
    if relabel is not None:
        target = relabel_seed(target, relabel)
    matrix = parse_map(Path(args.map).read_text(encoding="utf-8"), target_m=b.m, source=args.map)
    mapping = MonomialMap(
        matrix=matrix,
        source=b,
        target=target.matrix,
        target_path=tuple(path),
        relabel=None if relabel is None else tuple(relabel),
    )
    report = engine.classify(mapping)
    quasi = verify_quasi_hom(mapping, root, target)
    _emit({**report.model_dump(mode="json"), "quasi_homomorphism": quasi.passed})
    return EXIT_OK if quasi.passed else EXIT_FAILED


def _cmd_groups(engine: ClusterEngine, args: argparse.Namespace) -> int:
    report = engine.groups(_input(args), include_inverse=args.inverse)
    _emit({**report.summary(), "closed": report.closed})
    return EXIT_OK if report.closed else EXIT_FAILED


def _cmd_qaut(engine: ClusterEngine, args: argparse.Namespace) -> int:
    report = engine.qaut(_input(args))
    _emit(
        {
            "qaut0": report.qaut0.summary(),
            "aut_triv": report.aut_triv.summary(),
            "aut0_order": report.aut0_order,
            "star_reason": report.star_reason,
            "unimodular_everywhere": report.unimodular_everywhere,
        }
    )
    return EXIT_OK if report.qaut0.closed and report.aut_triv.closed else EXIT_FAILED


def _cmd_verify(engine: ClusterEngine, args: argparse.Namespace) -> int:
    if not args.type:
        raise ParseError("verify-formulas needs --type", 1, 1, "arguments")
    types = [TypeSpec.parse(name) for name in args.type.split(";")]
    move = None if args.move is None else Move(args.move)
    reports = engine.verify_formulas(types, trials=args.trials, rng_seed=args.rng_seed, move=move)
    payload = [r.summary() for r in reports]
    _emit(payload[0] if len(payload) == 1 else payload)
    return EXIT_OK if all(r.passed for r in reports) else EXIT_FAILED


def _cmd_examples(engine: ClusterEngine, args: argparse.Namespace) -> int:
    if args.run is None:
        _emit({"examples": fixture_names()})
        return EXIT_OK
    names = fixture_names() if args.run == "all" else [args.run]
    reports = [engine.run_example(name) for name in names]
    payload = [
        {"name": r.name, "passed": r.passed, "checks": [c.model_dump(mode="json") for c in r.checks]} for r in reports
    ]
    _emit(payload[0] if len(payload) == 1 else payload)
    return EXIT_OK if all(r.passed for r in reports) else EXIT_FAILED


_COMMANDS = {
    "mutate": _cmd_mutate,
    "graph": _cmd_graph,
    "classify": _cmd_classify,
    "groups": _cmd_groups,
    "qaut": _cmd_qaut,
    "verify-formulas": _cmd_verify,
    "examples": _cmd_examples,
}


def _add_input(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--matrix", help="Matrix file: 'n m' header, then m rows.")
    parser.add_argument("--quiver", help="Quiver file: 'v n f' header, then 'a i j p q' arrows.")
    parser.add_argument("--type", help="Type name such as A3, Aff_D5, Rank2(1,3), or a built-in fixture name.")
    parser.add_argument("--principal", action="store_true", help="Attach principal coefficients first.")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="coreason-cluster", description="Exact cluster algebra computations.")
    sub = parser.add_subparsers(dest="command", required=True)

    mutate = sub.add_parser("mutate", help="Mutate a matrix along a path.")
    _add_input(mutate)
    mutate.add_argument("--path", help="Directions k1,k2,... applied left to right.")
    mutate.add_argument("--json", action="store_true", help="Print JSON instead of the matrix format.")

    graph = sub.add_parser("graph", help="Explore the exchange graph.")
    _add_input(graph)
    graph.add_argument("--cap", type=int, help="Node cap.")
    graph.add_argument("--mode", choices=[m.value for m in KeyMode], help="Seed identity keys.")
    graph.add_argument("--dot", help="Write the graph in DOT format to this path.")

    classify = sub.add_parser("classify", help="Classify a monomial map between two seeds.")
    _add_input(classify)
    classify.add_argument("--map", required=True, help="Map file: 'x<j> -> <monomial>' lines.")
    classify.add_argument("--path", help="Mutation path of the target seed.")
    classify.add_argument("--relabel", help="Relabeling of the target seed, 1-based.")

    groups = sub.add_parser("groups", help="Aut+ of the trivial-coefficient algebra.")
    _add_input(groups)
    groups.add_argument("--cap", type=int, help="Node cap.")
    groups.add_argument("--inverse", action="store_true", help="Include inverse automorphisms.")

    qaut = sub.add_parser("qaut", help="QAut_0 and the groups it is compared with.")
    _add_input(qaut)
    qaut.add_argument("--cap", type=int, help="Node cap.")

    verify = sub.add_parser("verify-formulas", help="Check closed forms against literal mutation.")
    verify.add_argument("--type", help="Type names separated by ';'.")
    verify.add_argument("--trials", type=int, help="Random frozen rows per type.")
    verify.add_argument("--rng-seed", dest="rng_seed", type=int, help="Trial generator seed.")
    verify.add_argument("--move", choices=[m.value for m in Move], help="Move to check.")

    examples = sub.add_parser("examples", help="List or re-run the built-in examples.")
    examples.add_argument("--run", help="Example name, or 'all'.")
    return parser


def run(argv: Optional[Sequence[str]] = None) -> int:
    """Parses ``argv`` and runs one command, returning the exit code."""
    args = build_parser().parse_args(argv)
    try:
        engine = ClusterEngine(_config(args))
        with engine:
            return _COMMANDS[args.command](engine, args)
    except NotFinite as e:
        _emit({"cap_hit": True, "error": str(e)})
        return EXIT_FAILED
    except (ClusterError, ValidationError, OSError) as e:
        logger.debug(f"{args.command} rejected its input: {e!r}")
        sys.stderr.write(f"error: {e}\n")
        return EXIT_INPUT


def main() -> None:  # pragma: no cover
    sys.exit(run())


if __name__ == "__main__":  # pragma: no cover
    main()
