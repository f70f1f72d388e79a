"""Acceptance suite: one PASS/FAIL line per criterion in the terminal summary.

Run with ``pytest tests/test_acceptance.py`` (or ``python tests/test_acceptance.py``).
The scale test takes several minutes; set ``CUDFOPT_SKIP_SCALE=1`` to skip it.
"""

import itertools
import os
import random
import time

import pytest

from cudfopt.cli import main
from cudfopt.generate import generate, generate_text
from cudfopt.model import evaluate_criteria, initial_profile, parse_solution, parse_universe, validate_profile
from cudfopt.oracle import brute_force
from cudfopt.pbenc import encode
from cudfopt.pipeline import AGGREGATE, LEX, solve
from cudfopt.wcnf import bitwise_amo

from conftest import ANYTIME_ARGS, ANYTIME_KW

RESULTS: list = []

SMALL_TARGET = 210
INSTALLED_FRACTIONS = (0.0, 0.3, 0.7)
# a 20k-rule universe; seed and densities are fixed so the run is reproducible
SCALE = dict(seed=1, n_names=10000, max_versions=3, dep_density=0.4, conflict_density=0.05, installed_fraction=0.05)
BUDGET = 300


def record(number, title, ok, detail=""):
    RESULTS.append(f"[{'PASS' if ok else 'FAIL'}] criterion {number}: {title}" + (f" ({detail})" if detail else ""))
    return ok


def small_instances():
    """Seeded universes with at most 12 rules, cycling the installed fractions."""
    out, seed = [], 0
    while len(out) < SMALL_TARGET:
        rng = random.Random(seed)
        fraction = INSTALLED_FRACTIONS[len(out) % 3]
        universe, request = generate(
            seed, rng.randint(2, 7), 3, dep_density=0.4, conflict_density=0.2,
            installed_fraction=fraction, absent_fraction=0.1,
        )
        if universe.rule_count <= 12:
            out.append((seed, fraction, universe, request))
        seed += 1
    return out


@pytest.fixture(scope="module")
def small_runs():
    """Every (instance, criterion, mode) solve next to the oracle's answer."""
    start = time.monotonic()
    runs = []
    for seed, fraction, universe, request in small_instances():
        for criterion in ("paranoid", "trendy"):
            oracle = brute_force(universe, request, criterion)
            solved = {mode: solve(universe, request, criterion, mode, seed=seed) for mode in (LEX, AGGREGATE)}
            runs.append((seed, fraction, universe, request, criterion, oracle, solved))
    return runs, time.monotonic() - start


def test_criterion_1_oracle_equivalence(small_runs):
    runs, elapsed = small_runs
    mismatches = []
    for seed, _, _, _, criterion, oracle, solved in runs:
        for mode, sol in solved.items():
            if oracle.status == "Unsatisfiable":
                good = sol.status == "Unsatisfiable"
            else:
                good = sol.status == "Optimal" and sol.vector.values == oracle.vector.values
            if not good:
                mismatches.append((seed, criterion, mode))
    universes = len(runs) // 2
    fractions = {r[1] for r in runs}
    absent = sum(
        any(n not in u.by_name for r in u.rules.values() for d in r.depends for n, _ in d.alternatives)
        for _, _, u, *_ in runs[::2]
    )
    ok = not mismatches and universes >= 200 and fractions == set(INSTALLED_FRACTIONS) and absent > 0 and elapsed < 300
    record(1, "oracle equivalence", ok,
           f"{universes} universes, {absent} with absent-name dependencies, {len(mismatches)} mismatches, {elapsed:.1f}s")
    assert not mismatches, mismatches[:10]
    assert ok


def test_criterion_2_encoding_soundness(small_runs):
    runs, _ = small_runs
    bad = []
    for seed, _, universe, request, criterion, _, solved in runs:
        problem = encode(universe, request, criterion)
        for mode, sol in solved.items():
            if sol.profile is None:
                continue
            model = sol.report.final_model
            sums = tuple(sum(bool(model[v]) for v in level) for level in problem.level_vars)
            recomputed = evaluate_criteria(universe, initial_profile(universe), sol.profile, criterion).values
            if validate_profile(universe, request, sol.profile) or sums != recomputed:
                bad.append((seed, criterion, mode, sums, recomputed))
    record(2, "encoding soundness", not bad, f"{len(bad)} bad solves")
    assert not bad, bad[:10]


def test_criterion_3_bitwise_amo():
    failures = []
    for m in range(1, 9):
        counter = itertools.count(m + 1)
        clauses, bits = bitwise_amo(list(range(1, m + 1)), lambda: next(counter))
        k = len(bits)
        if len(clauses) != m * (m - 1).bit_length() or k != (m - 1).bit_length():
            failures.append((m, "size"))
        for xs in itertools.product([False, True], repeat=m):
            extendable = any(
                all(any(((None,) + xs + ys)[abs(l)] == (l > 0) for l in c) for c in clauses)
                for ys in itertools.product([False, True], repeat=k)
            )
            if extendable != (sum(xs) <= 1):
                failures.append((m, xs))
    record(3, "bitwise AMO exhaustive for m = 1..8", not failures)
    assert not failures, failures[:5]


def test_criterion_4_lexicographic_dominance():
    rng = random.Random(2024)
    disagreements = 0
    for _ in range(1000):
        universe, request = generate(rng.randint(0, 10**6), rng.randint(1, 40), 3,
                                     installed_fraction=rng.choice(INSTALLED_FRACTIONS))
        problem = encode(universe, request, rng.choice(("paranoid", "trendy")))
        sizes, weights = problem.level_sizes, problem.level_weights
        a = tuple(rng.randint(0, s) for s in sizes)
        b = tuple(rng.randint(0, s) for s in sizes)
        if rng.random() < 0.3:  # share a prefix so later levels decide
            cut = rng.randint(0, len(sizes))
            b = a[:cut] + b[cut:]
        agg_a = sum(w * v for w, v in zip(weights, a))
        agg_b = sum(w * v for w, v in zip(weights, b))
        if (agg_a < agg_b) != (a < b) or (agg_a == agg_b) != (a == b):
            disagreements += 1
    record(4, "lexicographic dominance of the aggregate weights", disagreements == 0,
           f"1000 pairs, {disagreements} disagreements")
    assert disagreements == 0


def test_criterion_5_mode_equivalence(small_runs):
    runs, _ = small_runs
    compared, differ = 0, []
    for seed, _, _, _, criterion, _, solved in runs:
        lex, agg = solved[LEX], solved[AGGREGATE]
        if lex.status == agg.status == "Optimal":
            compared += 1
            if lex.vector != agg.vector:
                differ.append((seed, criterion))
    record(5, "lex and aggregate modes agree", not differ, f"{compared} pairs compared")
    assert not differ


def test_criterion_6_anytime(tmp_path, capsys):
    universe, request = generate(*ANYTIME_ARGS, **ANYTIME_KW)
    path = tmp_path / "anytime.cudf"
    path.write_text(generate_text(*ANYTIME_ARGS, **ANYTIME_KW))
    out = tmp_path / "anytime.sol"
    code = main(["solve", str(path), "--criterion", "trendy", "--timeout", "1", "--output", str(out)])
    capsys.readouterr()
    text = out.read_text()
    profile = parse_solution(text)
    valid = profile is not None and not validate_profile(universe, request, profile)
    # the same budget in-process exposes the sequence of reported vectors
    seen = []
    sol = solve(universe, request, "trendy", timeout=1.0, progress=seen.append)
    monotone = all(b < a for a, b in zip(seen, seen[1:]))
    ok = (universe.rule_count >= 2000 and code == 1 and text.startswith("# status: best-effort u=(")
          and valid and monotone and sol.status == "BestEffort")
    record(6, "anytime behaviour under a 1 s budget", ok,
           f"{universe.rule_count} rules, exit {code}, {len(seen)} improving vectors")
    assert ok


@pytest.mark.skipif(os.environ.get("CUDFOPT_SKIP_SCALE") == "1", reason="scale test disabled")
def test_criterion_7_scale():
    params = dict(SCALE)
    universe, request = generate(params.pop("seed"), params.pop("n_names"), params.pop("max_versions"), **params)
    outcomes = {}
    for criterion in ("paranoid", "trendy"):
        start = time.monotonic()
        sol = solve(universe, request, criterion, timeout=BUDGET)
        elapsed = time.monotonic() - start
        valid = sol.profile is not None and not validate_profile(universe, request, sol.profile)
        outcomes[criterion] = (sol.status, elapsed, valid, sol.vector)
    par, tre = outcomes["paranoid"], outcomes["trendy"]
    ok = (universe.rule_count >= 20000
          and par[0] == "Optimal" and par[1] <= BUDGET and par[2]
          and tre[0] in ("Optimal", "BestEffort") and tre[1] <= BUDGET + 5 and tre[2])
    record(7, "20k-rule scale smoke test", ok,
           f"{universe.rule_count} rules; paranoid {par[0]} {par[3]} in {par[1]:.0f}s; "
           f"trendy {tre[0]} {tre[3]} in {tre[1]:.0f}s")
    assert ok


def test_criterion_8_trivial_identities():
    text = ("package: a\nversion: 1\ninstalled: true\n\npackage: b\nversion: 1\ninstalled: true\n\n"
            "package: b\nversion: 2\n\nrequest:\ninstall: a\n")
    universe, request = parse_universe(text)
    par = solve(universe, request, "paranoid")
    tre = solve(universe, request, "trendy")
    initial = initial_profile(universe)
    identity = (par.vector.values == (0, 0) and par.profile == initial
                and tre.vector.values[0] == 0 and tre.vector.values[2] == 0)
    absent, absent_request = parse_universe(text.replace("install: a", "install: zzz"))
    fails = all(solve(absent, absent_request, c, m).profile is None
                for c in ("paranoid", "trendy") for m in (LEX, AGGREGATE))
    record(8, "trivial identities", identity and fails)
    assert identity and fails


if __name__ == "__main__":
    raise SystemExit(pytest.main([__file__, "-q"]))
