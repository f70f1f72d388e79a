import random

import pytest

from cudfopt.generate import generate
from cudfopt.model import evaluate_criteria, initial_profile, parse_universe, validate_profile
from cudfopt.pbenc import write_opb_map
from cudfopt.pipeline import AGGREGATE, LEX, prepare, solve, solve_wcnf
from cudfopt.wcnf import write_wcnf, write_wcnf_map


def test_micro(micro):
    universe, request = micro
    sol = solve(universe, request, "paranoid")
    assert sol.status == "Optimal"
    assert sol.vector.values == (1, 2)
    assert [str(p) for p in sorted(sol.profile.members)] == ["p@2"]
    assert {str(p) for p in sol.removed} == {"p@1", "q@1"}
    assert {str(p) for p in sol.added} == {"p@2"}
    assert sol.level_costs == (1, 2)


def test_absent_request_fails():
    universe, request = parse_universe("package: a\nversion: 1\ninstalled: true\n\nrequest:\ninstall: nothere\n")
    for mode in (LEX, AGGREGATE):
        sol = solve(universe, request, "trendy", mode)
        assert sol.status == "Unsatisfiable" and sol.profile is None


def test_already_installed_request():
    text = "package: a\nversion: 1\ninstalled: true\n\npackage: b\nversion: 1\ninstalled: true\n\nrequest:\ninstall: a\n"
    universe, request = parse_universe(text)
    assert solve(universe, request, "paranoid").vector.values == (0, 0)
    sol = solve(universe, request, "trendy")
    assert sol.vector.values[0] == sol.vector.values[2] == 0
    assert sol.profile == initial_profile(universe)


@pytest.mark.parametrize("seed", range(12))
def test_integrity_and_file_resume(seed):
    rng = random.Random(seed)
    universe, request = generate(seed, rng.randint(5, 25), 3, installed_fraction=0.4)
    for criterion in ("paranoid", "trendy"):
        sol = solve(universe, request, criterion, seed=seed)
        problem, wcnf, _ = prepare(universe, request, criterion)
        resumed = solve_wcnf(
            universe,
            request,
            write_wcnf(wcnf),
            write_wcnf_map(wcnf, problem.num_vars, "x.opb.map"),
            write_opb_map(problem.varmap),
        )
        assert resumed.status == sol.status
        if sol.profile is None:
            continue
        assert not validate_profile(universe, request, sol.profile)
        assert evaluate_criteria(universe, initial_profile(universe), sol.profile, criterion) == sol.vector
        assert sol.level_costs == sol.vector.values
        assert resumed.vector == sol.vector
        assert solve(universe, request, criterion, AGGREGATE).vector == sol.vector


def test_progress_is_non_increasing():
    universe, request = generate(11, 200, 3, installed_fraction=0.3)
    seen = []
    sol = solve(universe, request, "trendy", progress=seen.append)
    assert seen == sol.history
    assert all(b < a for a, b in zip(seen, seen[1:]))
    if sol.vector is not None:
        assert seen[-1] == sol.vector.values
