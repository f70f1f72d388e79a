import itertools

import pytest
from hypothesis import given, settings, strategies as st

from cudfopt.generate import generate
from cudfopt.model import (
    ANY,
    CudfError,
    PackageId,
    Profile,
    VersionConstraint,
    evaluate_criteria,
    expand_constraint,
    initial_profile,
    latest,
    parse_solution,
    parse_universe,
    render_solution,
    render_universe,
    validate_profile,
)


def P(name, version):
    return PackageId(name, version)


def test_parse_micro(micro):
    universe, request = micro
    assert universe.rule_count == 3
    assert universe.installed_count == 2
    assert universe.name_count == 2
    assert request.install == (("p", VersionConstraint("=", 2)),)
    assert universe.by_name["p"] == (1, 2)


def test_parse_dependency_alternatives():
    u, _ = parse_universe("package: a\nversion: 1\ndepends: b | c (>= 2)\n\nrequest:\ninstall: a\n")
    (clause,) = u[P("a", 1)].depends
    assert clause.alternatives == (("b", ANY), ("c", VersionConstraint(">=", 2)))


def test_parse_several_clauses_and_conflicts():
    text = "package: a\nversion: 3\ndepends: b, c (!= 1) | d\nconflicts: e (< 2), f\n\nrequest:\ninstall: a, b (= 1)\n"
    u, r = parse_universe(text)
    rule = u[P("a", 3)]
    assert len(rule.depends) == 2
    assert rule.depends[1].alternatives == (("c", VersionConstraint("!=", 1)), ("d", ANY))
    assert rule.conflicts == (("e", VersionConstraint("<", 2)), ("f", ANY))
    assert r.install == (("a", ANY), ("b", VersionConstraint("=", 1)))


@pytest.mark.parametrize(
    "text, fragment",
    [
        ("package: p\nversion: 1\n\npackage: p\nversion: 1\n\nrequest:\ninstall: p\n", "duplicate"),
        ("package: p\nversion: 1\n", "no request"),
        ("package: p\nversion: 1\n\nrequest:\n", "empty request"),
        ("package: p\nversion: x\n\nrequest:\ninstall: p\n", "line 2"),
        ("package: p\nversion: 1\ndepends: q (~ 2)\n\nrequest:\ninstall: p\n", "line 3"),
        ("package: p\nversion: 0\n\nrequest:\ninstall: p\n", "positive"),
        ("package: p\nbogus line\n\nrequest:\ninstall: p\n", "line 2"),
        ("version: 1\n\nrequest:\ninstall: p\n", "stanza must start"),
    ],
)
def test_parse_errors(text, fragment):
    with pytest.raises(CudfError, match=fragment):
        parse_universe(text)


def test_latest(micro):
    universe, _ = micro
    assert latest(universe, "p") == 2
    assert latest(universe, "q") == 1
    with pytest.raises(KeyError):
        latest(universe, "r")


def test_latest_sparse_versions():
    text = "".join(f"package: p\nversion: {v}\n\n" for v in (5, 1, 2)) + "request:\ninstall: p\n"
    u, _ = parse_universe(text)
    assert u.by_name["p"] == (1, 2, 5)
    assert latest(u, "p") == 5


def test_expand_constraint(micro):
    universe, _ = micro
    assert expand_constraint(universe, "p", ANY) == {P("p", 1), P("p", 2)}
    assert expand_constraint(universe, "p", VersionConstraint(">=", 2)) == {P("p", 2)}
    assert expand_constraint(universe, "z", ANY) == frozenset()
    assert expand_constraint(universe, "p", VersionConstraint("!=", 1)) == {P("p", 2)}


DEP = "package: a\nversion: 1\ndepends: b\n\npackage: b\nversion: 1\n\nrequest:\ninstall: a\n"


def test_validate_satisfied_dependency():
    u, r = parse_universe(DEP)
    assert validate_profile(u, r, Profile([P("a", 1), P("b", 1)])) == []


def test_validate_missing_dependency():
    u, r = parse_universe(DEP)
    (v,) = validate_profile(u, r, Profile([P("a", 1)]))
    assert v.kind == "depends" and v.package == P("a", 1)


def test_validate_conflict(micro):
    universe, request = micro
    problems = validate_profile(universe, request, Profile([P("p", 2), P("q", 1)]))
    assert [(v.kind, v.package) for v in problems] == [("conflicts", P("q", 1))]


def test_validate_exclusive_and_request(micro):
    universe, request = micro
    kinds = {v.kind for v in validate_profile(universe, request, Profile([P("p", 1), P("p", 2)]))}
    assert "exclusive" in kinds
    kinds = {v.kind for v in validate_profile(universe, request, Profile([P("q", 1)]))}
    assert kinds == {"request"}


def test_validate_unknown_member(micro):
    universe, request = micro
    with pytest.raises(KeyError):
        validate_profile(universe, request, Profile([P("zz", 1)]))


def test_self_conflict_never_excludes_itself(micro):
    universe, request = micro
    assert validate_profile(universe, request, Profile([P("p", 2)])) == []


def test_criteria_identity(micro):
    universe, _ = micro
    init = initial_profile(universe)
    assert evaluate_criteria(universe, init, init, "paranoid").values == (0, 0)
    assert evaluate_criteria(universe, init, init, "trendy").values == (0, 1, 0)


def _oracle_scores(universe, request, criterion):
    """Enumerate the 2^3 subsets of the micro universe by hand."""
    ids = list(universe.rules)
    init = initial_profile(universe)
    out = {}
    for bits in itertools.product([0, 1], repeat=len(ids)):
        prof = Profile(i for i, b in zip(ids, bits) if b)
        if not validate_profile(universe, request, prof):
            out[prof] = evaluate_criteria(universe, init, prof, criterion).values
    return out


def test_criteria_micro_transition(micro):
    universe, request = micro
    scores = _oracle_scores(universe, request, "paranoid")
    assert scores == {Profile([P("p", 2)]): (1, 2)}
    scores = _oracle_scores(universe, request, "trendy")
    assert scores == {Profile([P("p", 2)]): (1, 0, 0)}


def test_render_solution():
    text = render_solution(Profile([P("b", 2), P("a", 1)]))
    assert text == "package: a\nversion: 1\ninstalled: true\n\npackage: b\nversion: 2\ninstalled: true\n"
    assert render_solution(Profile()) == ""
    assert render_solution(None) == "FAIL\n"
    assert render_solution(Profile([P("p", 1), P("p", 2)])).count("package: p") == 2


def test_solution_round_trip():
    prof = Profile([P("b", 2), P("a", 1)])
    assert parse_solution(render_solution(prof)) == prof
    assert parse_solution("FAIL\n") is None
    assert parse_solution("") == Profile()
    assert parse_solution("# status: best-effort u=(1, 2)\n" + render_solution(prof)) == prof


universes = st.builds(
    generate,
    seed=st.integers(0, 10_000),
    n_names=st.integers(1, 6),
    max_versions=st.integers(1, 3),
    dep_density=st.floats(0, 1),
    conflict_density=st.floats(0, 1),
    installed_fraction=st.sampled_from([0.0, 0.3, 0.7, 1.0]),
)


@settings(max_examples=60, deadline=None)
@given(universes)
def test_render_parse_round_trip(ur):
    universe, request = ur
    u2, r2 = parse_universe(render_universe(universe, request))
    assert u2 == universe
    assert r2 == request
    assert list(u2) == list(universe)


@settings(max_examples=60, deadline=None)
@given(universes, st.data())
def test_criteria_bounds_on_valid_profiles(ur, data):
    universe, request = ur
    ids = list(universe.rules)
    prof = Profile(data.draw(st.lists(st.sampled_from(ids), unique=True)) if ids else [])
    for name in list(universe.by_name):
        assert expand_constraint(universe, name, ANY) == {i for i in ids if i.name == name}
    if validate_profile(universe, request, prof):
        return
    init = initial_profile(universe)
    removed, changed = evaluate_criteria(universe, init, prof, "paranoid").values
    _, notuptodate, new = evaluate_criteria(universe, init, prof, "trendy").values
    assert removed <= len(universe.installed_names())
    assert removed <= changed <= universe.name_count
    assert new <= universe.name_count and notuptodate <= universe.name_count
    same = init.members == prof.members
    assert (changed == 0) == same
