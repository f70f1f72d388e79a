import random

import pytest

from cudfopt.generate import generate
from cudfopt.model import PackageId, Universe, evaluate_criteria, initial_profile, parse_universe, validate_profile
from cudfopt.oracle import brute_force


def test_micro_paranoid(micro):
    universe, request = micro
    result = brute_force(universe, request, "paranoid")
    assert result.status == "Optimal"
    assert result.vector.values == (1, 2)  # q removed; p and q both changed
    assert result.witness.members == {PackageId("p", 2)}
    assert result.explored == 8


def test_micro_trendy(micro):
    universe, request = micro
    # p@2 is the latest p, and no name goes from absent to present
    assert brute_force(universe, request, "trendy").vector.values == (1, 0, 0)


def test_unsatisfiable_request():
    universe, request = parse_universe("package: a\nversion: 1\n\nrequest:\ninstall: z\n")
    result = brute_force(universe, request, "paranoid")
    assert result.status == "Unsatisfiable" and result.vector is None and result.witness is None


def test_limit():
    universe, request = generate(0, 30, 1)
    with pytest.raises(ValueError):
        brute_force(universe, request, "paranoid")


@pytest.mark.parametrize("seed", range(10))
def test_witness_rescores_and_permutation_invariance(seed):
    universe, request = generate(seed, 4, 2, installed_fraction=0.5)
    for criterion in ("paranoid", "trendy"):
        result = brute_force(universe, request, criterion)
        if result.status == "Unsatisfiable":
            continue
        assert not validate_profile(universe, request, result.witness)
        again = evaluate_criteria(universe, initial_profile(universe), result.witness, criterion)
        assert again == result.vector
        rules = list(universe.rules.values())
        random.Random(seed).shuffle(rules)
        assert brute_force(Universe(rules), request, criterion).vector == result.vector
