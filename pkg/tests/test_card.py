import itertools

import pytest

from cudfopt.card import WeightedBound, at_most_k


def counter(start):
    state = [start]

    def new_var():
        state[0] += 1
        return state[0]

    return new_var, state


def extendable(clauses, xs, total):
    n = len(xs)
    for ys in itertools.product([False, True], repeat=total - n):
        a = (None,) + tuple(xs) + ys
        if all(any(a[abs(l)] == (l > 0) for l in c) for c in clauses):
            return True
    return False


@pytest.mark.parametrize("n,k", [(n, k) for n in range(1, 6) for k in range(-1, n + 1)])
def test_at_most_k(n, k):
    new_var, state = counter(n)
    clauses = at_most_k(list(range(1, n + 1)), k, new_var)
    for xs in itertools.product([False, True], repeat=n):
        assert extendable(clauses, xs, state[0]) == (sum(xs) <= k)


@pytest.mark.parametrize("limits", [[7], [9, 5, 4, 0], [3, 2]])
def test_weighted_bound_tightening(limits):
    weights = (4, 2, 1)
    sizes = (2, 2, 2)
    n = sum(sizes)
    new_var, state = counter(n)
    strata, v = [], 1
    for w, size in zip(weights, sizes):
        strata.append((w, list(range(v, v + size))))
        v += size
    wb = WeightedBound(strata, new_var)
    clauses = []
    for limit in limits:
        clauses += wb.bound(limit)
        for xs in itertools.product([False, True], repeat=n):
            total = sum(w * sum(xs[l - 1] for l in lits) for w, lits in strata)
            assert extendable(clauses, xs, state[0]) == (total <= limit)


def test_weighted_bound_negative_limit():
    new_var, _ = counter(1)
    assert WeightedBound([(1, [1])], new_var).bound(-1) == [()]
