"""Command line driver: ``cudfopt solve|translate|oracle|generate|validate``.

Exit codes: 0 optimal (or valid), 1 best effort, 2 FAIL (or invalid),
3 input or I/O error, 4 internal error.
"""

from __future__ import annotations

import argparse
import logging
import os
import sys
import threading
from pathlib import Path

from . import maxsat, pipeline
from .generate import generate_text
from .model import (
    CRITERIA,
    PARANOID,
    CudfError,
    evaluate_criteria,
    initial_profile,
    parse_solution,
    parse_universe,
    render_solution,
)
from .oracle import brute_force
from .pbenc import write_opb, write_opb_map
from .sat import CancelToken, solve_dimacs
from .wcnf import write_wcnf, write_wcnf_map

EXIT_OPTIMAL = 0
EXIT_BEST_EFFORT = 1
EXIT_FAIL = 2
EXIT_INPUT = 3
EXIT_INTERNAL = 4

log = logging.getLogger("cudfopt")


class InputError(Exception):
    """Unreadable or malformed input; maps to exit code 3."""


def _read(path: str) -> str:
    try:
        return sys.stdin.read() if path == "-" else Path(path).read_text()
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc.strerror or exc}") from exc


def _write(path: str | None, text: str):
    if path is None or path == "-":
        sys.stdout.write(text)
        return
    try:
        Path(path).write_text(text)
    except OSError as exc:
        raise InputError(f"cannot write {path}: {exc.strerror or exc}") from exc


def _load(path: str):
    try:
        return parse_universe(_read(path))
    except CudfError as exc:
        raise InputError(f"{path}: {exc}") from exc


def _positive_int(text: str) -> int:
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError("must be at least 1")
    return value


def _fraction(text: str) -> float:
    value = float(text)
    if not 0.0 <= value <= 1.0:
        raise argparse.ArgumentTypeError("must lie in [0, 1]")
    return value


def _vector(values) -> str:
    return "(" + ",".join(str(v) for v in values) + ")"


def _dump(problem, wcnf, opb_path: str | None, wcnf_path: str | None):
    """Write the OPB and/or WCNF stages with their mapping sidecars."""
    if wcnf_path and not opb_path:
        opb_path = wcnf_path + ".opb"  # the WCNF map must point at an OPB map
    if opb_path:
        _write(opb_path, write_opb(problem))
        _write(opb_path + ".map", write_opb_map(problem.varmap))
    if wcnf_path:
        _write(wcnf_path, write_wcnf(wcnf))
        opb_map = os.path.relpath(opb_path + ".map", os.path.dirname(os.path.abspath(wcnf_path)))
        _write(wcnf_path + ".map", write_wcnf_map(wcnf, problem.num_vars, opb_map))


def _resume(universe, request, args, wcnf_path: str):
    from .wcnf import read_wcnf_map

    wcnf_text = _read(wcnf_path)
    map_text = _read(wcnf_path + ".map")
    _, opb_map = read_wcnf_map(map_text)
    if opb_map is None:
        raise InputError(f"{wcnf_path}.map has no '# opb-map:' header")
    if not os.path.isabs(opb_map):
        opb_map = os.path.join(os.path.dirname(os.path.abspath(wcnf_path)), opb_map)
    try:
        return pipeline.solve_wcnf(
            universe, request, wcnf_text, map_text, _read(opb_map), args.mode, timeout=None, seed=args.seed
        )
    except ValueError as exc:
        raise InputError(f"{wcnf_path}: {exc}") from exc


def cmd_solve(args) -> int:
    universe, request = _load(args.input)
    token = CancelToken()
    timer = threading.Timer(args.timeout, token.cancel)
    timer.daemon = True
    timer.start()
    try:
        if args.from_wcnf:
            solution = _resume(universe, request, args, args.from_wcnf)
        else:
            problem, wcnf, groups = pipeline.prepare(universe, request, args.criterion)
            _dump(problem, wcnf, args.dump_opb, args.dump_wcnf)
            solution = pipeline.solve(
                universe,
                request,
                args.criterion,
                args.mode,
                timeout=None,
                seed=args.seed,
                cancel=token,
                progress=lambda v: log.info("improved %s", _vector(v)),
            )
    finally:
        timer.cancel()
    if solution.profile is None:
        _write(args.output, render_solution(None))
        if solution.status == maxsat.UNSATISFIABLE:
            return EXIT_FAIL
        print("error: budget exhausted before any solution was found", file=sys.stderr)
        return EXIT_FAIL
    text = render_solution(solution.profile)
    if solution.status == maxsat.OPTIMAL:
        _write(args.output, text)
        log.info("optimal %s", solution.vector)
        return EXIT_OPTIMAL
    _write(args.output, f"# status: best-effort u={_vector(solution.vector)}\n" + text)
    return EXIT_BEST_EFFORT


def cmd_translate(args) -> int:
    universe, request = _load(args.input)
    stem = str(Path(args.input).with_suffix("")) if args.input != "-" else "stdin"
    problem, wcnf, _ = pipeline.prepare(universe, request, args.criterion)
    _dump(problem, wcnf, args.dump_opb or stem + ".opb", args.dump_wcnf or stem + ".wcnf")
    return EXIT_OPTIMAL


def cmd_oracle(args) -> int:
    universe, request = _load(args.input)
    try:
        result = brute_force(universe, request, args.criterion, limit=args.limit)
    except ValueError as exc:
        raise InputError(str(exc)) from exc
    if result.witness is None:
        _write(args.output, render_solution(None))
        return EXIT_FAIL
    _write(args.output, f"# vector: {_vector(result.vector.values)}\n" + render_solution(result.witness))
    return EXIT_OPTIMAL


def cmd_generate(args) -> int:
    text = generate_text(
        args.seed,
        args.names,
        args.max_versions,
        dep_density=args.dep_density,
        conflict_density=args.conflict_density,
        installed_fraction=args.installed_fraction,
    )
    _write(args.output, text)
    return EXIT_OPTIMAL


def cmd_validate(args) -> int:
    from .model import validate_profile

    universe, request = _load(args.input)
    try:
        profile = parse_solution(_read(args.solution))
    except CudfError as exc:
        raise InputError(f"{args.solution}: {exc}") from exc
    if profile is None:
        print("FAIL")
        return EXIT_FAIL
    try:
        problems = validate_profile(universe, request, profile)
    except KeyError as exc:
        print(f"invalid: {exc.args[0]}")
        return EXIT_FAIL
    if problems:
        for p in problems:
            print(f"invalid: {p}")
        return EXIT_FAIL
    vector = evaluate_criteria(universe, initial_profile(universe), profile, args.criterion)
    print(f"valid {args.criterion} {_vector(vector.values)}")
    return EXIT_OPTIMAL


def cmd_sat(args) -> int:
    out = solve_dimacs(_read(args.input))
    sys.stdout.write(out)
    return EXIT_OPTIMAL if out.startswith("s SATISFIABLE") else EXIT_FAIL


def cmd_maxsat(args) -> int:
    try:
        out = maxsat.solve_wcnf_text(_read(args.input), timeout=args.timeout)
    except ValueError as exc:
        raise InputError(str(exc)) from exc
    sys.stdout.write(out)
    if "s OPTIMUM FOUND" in out:
        return EXIT_OPTIMAL
    return EXIT_BEST_EFFORT if "s SATISFIABLE" in out else EXIT_FAIL


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="cudfopt", description="Optimal package upgrades via MaxSAT.")
    parser.add_argument("-v", "--verbose", action="count", default=0, help="log progress to stderr")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, output=True):
        p.add_argument("input", help="universe document ('-' for stdin)")
        p.add_argument("--criterion", choices=CRITERIA, default=PARANOID)
        if output:
            p.add_argument("--output", help="output file (default stdout)")

    p = sub.add_parser("solve", help="solve an upgrade request")
    common(p)
    p.add_argument("--mode", choices=(pipeline.LEX, pipeline.AGGREGATE), default=pipeline.LEX)
    p.add_argument("--timeout", type=_positive_int, default=int(maxsat.DEFAULT_TIMEOUT), help="seconds")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--dump-opb", metavar="PATH")
    p.add_argument("--dump-wcnf", metavar="PATH")
    p.add_argument("--from-wcnf", metavar="PATH", help="resume from a dumped WCNF and its .map sidecar")
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("translate", help="write the OPB and WCNF stages with mapping files")
    common(p, output=False)
    p.add_argument("--dump-opb", metavar="PATH")
    p.add_argument("--dump-wcnf", metavar="PATH")
    p.set_defaults(func=cmd_translate)

    p = sub.add_parser("oracle", help="exhaustive reference solver for small universes")
    common(p)
    p.add_argument("--limit", type=_positive_int, default=20, help="maximum rule count")
    p.set_defaults(func=cmd_oracle)

    p = sub.add_parser("generate", help="write a seeded random universe")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--names", type=_positive_int, default=10)
    p.add_argument("--max-versions", type=_positive_int, default=3)
    p.add_argument("--dep-density", type=_fraction, default=0.4)
    p.add_argument("--conflict-density", type=_fraction, default=0.1)
    p.add_argument("--installed-fraction", type=_fraction, default=0.3)
    p.add_argument("--output")
    p.set_defaults(func=cmd_generate)

    p = sub.add_parser("validate", help="check a solution document against a universe")
    common(p, output=False)
    p.add_argument("solution")
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("sat", help="plain DIMACS CNF solver")
    p.add_argument("input")
    p.set_defaults(func=cmd_sat)

    p = sub.add_parser("maxsat", help="plain WCNF solver")
    p.add_argument("input")
    p.add_argument("--timeout", type=_positive_int, default=int(maxsat.DEFAULT_TIMEOUT))
    p.set_defaults(func=cmd_maxsat)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_INPUT if exc.code else EXIT_OPTIMAL
    level = logging.WARNING - 10 * min(args.verbose, 2)
    logging.basicConfig(level=level, format="%(name)s: %(message)s", stream=sys.stderr)
    try:
        return args.func(args)
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except pipeline.InvalidSolution as exc:
        print(f"internal error: solver produced an invalid profile: {exc}", file=sys.stderr)
        return EXIT_INTERNAL
    except Exception as exc:  # noqa: BLE001 - last line of defence for the exit-code contract
        log.debug("unhandled", exc_info=True)
        print(f"internal error: {exc}", file=sys.stderr)
        return EXIT_INTERNAL


if __name__ == "__main__":
    sys.exit(main())
