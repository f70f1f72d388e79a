"""Counter-based cardinality and weighted-sum bounds as CNF.

Only upper bounds are needed, so registers are implied one way: a register
"at least j of the first i inputs are true" is forced true whenever the
inputs make it so, and forbidding a register forbids the count.
"""

from __future__ import annotations

from typing import Callable, Sequence

__all__ = ["sequential_counter", "at_most_k", "WeightedBound"]


def sequential_counter(lits: Sequence[int], cap: int, new_var: Callable[[], int]) -> tuple:
    """Unary counter over ``lits`` saturating at ``cap``.

    Returns ``(clauses, outputs)`` where ``outputs[j - 1]`` is a literal
    implied by "at least j inputs true", for ``j`` in ``1..min(cap, len(lits))``.
    """
    clauses = []
    prev: list = []
    for i, x in enumerate(lits):
        width = min(i + 1, cap)
        cur = [new_var() for _ in range(width)]
        clauses.append((-x, cur[0]))
        for j in range(1, width + 1):
            if j <= len(prev):
                clauses.append((-prev[j - 1], cur[j - 1]))
            if j >= 2 and j - 1 <= len(prev):
                clauses.append((-x, -prev[j - 2], cur[j - 1]))
        prev = cur
    return clauses, prev


def at_most_k(lits: Sequence[int], k: int, new_var: Callable[[], int]) -> list:
    """Clauses forcing at most ``k`` of ``lits`` true."""
    if k < 0:
        return [()]
    if k >= len(lits):
        return []
    if k == 0:
        return [(-x,) for x in lits]
    clauses, outputs = sequential_counter(lits, k + 1, new_var)
    clauses.append((-outputs[k],))
    return clauses


class WeightedBound:
    """``sum_k weight_k * count(stratum_k) <= K`` for strata of equal weight.

    One unary counter per stratum is built on first use, sized for the first
    (loosest) bound.  Each later call to :meth:`bound` only adds clauses that
    forbid the combinations of stratum counts exceeding the new, smaller ``K``.
    """

    def __init__(self, strata: Sequence[tuple], new_var: Callable[[], int]):
        self.strata = [(w, list(lits)) for w, lits in strata if lits]
        self.new_var = new_var
        self.outputs = None
        self.caps = None

    def bound(self, limit: int) -> list:
        clauses = []
        if limit < 0:
            return [()]
        if self.outputs is None:
            self.caps = [min(len(lits), limit // w + 1) for w, lits in self.strata]
            self.outputs = []
            for (w, lits), cap in zip(self.strata, self.caps):
                cls, outs = sequential_counter(lits, cap, self.new_var)
                clauses.extend(cls)
                self.outputs.append(outs)
        self._forbid(0, limit, [], clauses)
        return clauses

    def _forbid(self, k, remaining, prefix, clauses):
        """Forbid every count vector from stratum ``k`` on whose weight exceeds ``remaining``."""
        if k == len(self.strata):
            return
        w, _ = self.strata[k]
        outs = self.outputs[k]
        last = k == len(self.strata) - 1
        for c in range(0, len(outs) + 1):
            if c * w > remaining:
                clauses.append(tuple(prefix + [-outs[c - 1]]))
                return
            if last:
                continue
            nxt = prefix + ([-outs[c - 1]] if c else [])
            self._forbid(k + 1, remaining - c * w, nxt, clauses)
