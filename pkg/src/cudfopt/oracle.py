"""Exhaustive reference solver for small universes.

Every subset of the universe is tried, in bitmask order over the sorted rule
list.  Nothing is pruned: the point is to be obviously right, not fast.
"""

from __future__ import annotations

from dataclasses import dataclass

from .model import (
    CriteriaVector,
    Profile,
    Request,
    Universe,
    evaluate_criteria,
    initial_profile,
    validate_profile,
)

__all__ = ["OracleResult", "brute_force", "DEFAULT_LIMIT"]

DEFAULT_LIMIT = 20


@dataclass(frozen=True)
class OracleResult:
    status: str  # "Optimal" | "Unsatisfiable"
    vector: CriteriaVector | None
    witness: Profile | None
    explored: int


def brute_force(universe: Universe, request: Request, criterion: str, limit: int = DEFAULT_LIMIT) -> OracleResult:
    rules = list(universe.rules)
    n = len(rules)
    if n > limit:
        raise ValueError(f"universe has {n} rules, oracle limit is {limit}")
    initial = initial_profile(universe)
    best = witness = None
    for mask in range(1 << n):
        profile = Profile(rules[i] for i in range(n) if mask >> i & 1)
        if validate_profile(universe, request, profile):
            continue
        vector = evaluate_criteria(universe, initial, profile, criterion)
        if best is None or vector.values < best.values:
            best, witness = vector, profile
    status = "Unsatisfiable" if best is None else "Optimal"
    return OracleResult(status, best, witness, 1 << n)
