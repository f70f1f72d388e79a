"""End-to-end solving: encode, translate, optimize, decode, check, score."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

from . import maxsat
from .model import (
    CriteriaVector,
    PackageId,
    PARANOID,
    TRENDY,
    Profile,
    Request,
    Universe,
    evaluate_criteria,
    initial_profile,
    validate_profile,
)
from .pbenc import LEVEL_KINDS, encode, read_opb_map
from .sat import CancelToken
from .wcnf import group_levels, pb_to_wcnf, read_wcnf, read_wcnf_map

__all__ = ["Solution", "InvalidSolution", "solve", "solve_wcnf", "prepare", "LEX", "AGGREGATE"]

LEX = "lex"
AGGREGATE = "aggregate"


class InvalidSolution(RuntimeError):
    """The optimizer produced a profile that fails validation."""


@dataclass
class Solution:
    status: str
    profile: Profile | None
    vector: CriteriaVector | None
    report: maxsat.SolveReport
    initial: Profile
    criterion: str
    history: list = field(default_factory=list)  # criteria tuples of each improving model

    @property
    def added(self) -> set:
        return set(self.profile.members - self.initial.members) if self.profile else set()

    @property
    def removed(self) -> set:
        return set(self.initial.members - self.profile.members) if self.profile else set()

    @property
    def level_costs(self) -> tuple:
        return self.report.costs


def prepare(universe: Universe, request: Request, criterion: str) -> tuple:
    """Returns ``(PBProblem, WCNF, soft groups)``."""
    problem = encode(universe, request, criterion)
    wcnf = pb_to_wcnf(problem)
    groups = group_levels(wcnf, problem.level_sizes, problem.level_weights)
    return problem, wcnf, groups


def _run(wcnf, groups, mode, timeout, cancel, progress, seed):
    if mode == LEX:
        return maxsat.solve_lexicographic(wcnf, groups, timeout=timeout, cancel=cancel, progress=progress, seed=seed)
    if mode == AGGREGATE:
        return maxsat.solve_aggregate(wcnf, groups, timeout=timeout, cancel=cancel, progress=progress, seed=seed)
    raise ValueError(f"unknown mode {mode!r}")


def _finish(universe, request, criterion, report, package_of, wcnf_to_opb, history) -> Solution:
    initial = initial_profile(universe)
    if report.final_model is None:
        return Solution(report.status, None, None, report, initial, criterion, history)
    profile = maxsat.decode(report.final_model, package_of, wcnf_to_opb)
    problems = validate_profile(universe, request, profile)
    if problems:
        raise InvalidSolution("; ".join(str(p) for p in problems))
    vector = evaluate_criteria(universe, initial, profile, criterion)
    return Solution(report.status, profile, vector, report, initial, criterion, history)


def solve(
    universe: Universe,
    request: Request,
    criterion: str,
    mode: str = LEX,
    timeout: float | None = maxsat.DEFAULT_TIMEOUT,
    seed: int = 0,
    cancel: CancelToken | None = None,
    progress: Callable | None = None,
) -> Solution:
    """Solve in memory.  ``progress`` receives criteria tuples as models improve."""
    problem, wcnf, groups = prepare(universe, request, criterion)
    history: list = []

    def on_model(vector, model):
        history.append(vector)
        if progress is not None:
            progress(vector)

    report = _run(wcnf, groups, mode, timeout, cancel, on_model, seed)
    return _finish(universe, request, criterion, report, problem.varmap.package_of(), None, history)


def _criterion_from_map(opb_map: dict) -> tuple:
    """Criterion and level sizes implied by the indicator entries of an OPB map."""
    kinds: dict = {}
    for entry in opb_map.values():
        if isinstance(entry, tuple):
            kinds[entry[1]] = kinds.get(entry[1], 0) + 1
    criterion = TRENDY if {"notuptodate", "new"} & set(kinds) else PARANOID
    return criterion, tuple(kinds.get(k, 0) for k in LEVEL_KINDS[criterion])


def solve_wcnf(
    universe: Universe,
    request: Request,
    wcnf_text: str,
    wcnf_map_text: str,
    opb_map_text: str,
    mode: str = LEX,
    timeout: float | None = maxsat.DEFAULT_TIMEOUT,
    seed: int = 0,
) -> Solution:
    """Resume from dumped WCNF and mapping files."""
    wcnf = read_wcnf(wcnf_text)
    wcnf_to_opb, _ = read_wcnf_map(wcnf_map_text)
    opb_map = read_opb_map(opb_map_text)
    criterion, sizes = _criterion_from_map(opb_map)
    groups = group_levels(wcnf, sizes)
    history: list = []
    report = _run(wcnf, groups, mode, timeout, None, lambda v, m: history.append(v), seed)
    package_of = {v: e for v, e in opb_map.items() if isinstance(e, PackageId)}
    return _finish(universe, request, criterion, report, package_of, wcnf_to_opb, history)
