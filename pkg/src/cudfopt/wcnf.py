"""Partial weighted MaxSAT form of a pseudo-Boolean problem.

Clause-shaped constraints become hard clauses verbatim, at-most-one
constraints become hard binary clauses through the bitwise (binary) encoding,
and each objective term ``w * lit`` becomes the soft unit clause ``(-lit, w)``.
Hard clauses carry the top weight, one more than the sum of all soft weights.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Iterable, Sequence

__all__ = [
    "TranslationError",
    "SoftClause",
    "SoftGroup",
    "WCNF",
    "bitwise_amo",
    "normalize_constraint",
    "pb_to_wcnf",
    "group_levels",
    "write_wcnf",
    "read_wcnf",
    "write_wcnf_map",
    "read_wcnf_map",
]


class TranslationError(ValueError):
    pass


@dataclass(frozen=True)
class SoftClause:
    clause: tuple
    weight: int

    def __post_init__(self):
        if self.weight < 1:
            raise ValueError(f"soft clause weight must be >= 1, got {self.weight}")


@dataclass(frozen=True)
class SoftGroup:
    weight: int | None
    clauses: tuple

    def __len__(self):
        return len(self.clauses)


@dataclass
class WCNF:
    num_vars: int = 0
    hard: list = field(default_factory=list)
    soft: list = field(default_factory=list)
    aux_map: dict = field(default_factory=dict)  # aux var -> (label, bit)

    @property
    def top(self) -> int:
        return 1 + sum(s.weight for s in self.soft)

    def cost(self, model) -> int:
        """Total weight of soft clauses falsified by ``model`` (indexable by var)."""
        return sum(s.weight for s in self.soft if not _sat(s.clause, model))

    def hard_satisfied(self, model) -> bool:
        return all(_sat(c, model) for c in self.hard)


def _sat(clause, model) -> bool:
    return any(bool(model[abs(lit)]) == (lit > 0) for lit in clause)


def bitwise_amo(lits: Sequence[int], new_var: Callable[[], int]) -> tuple:
    """At-most-one over ``lits`` with ceil(log2 m) fresh bit variables.

    Literal ``i`` (0-based) forces the bits to the binary digits of ``i``; two
    true literals would force different patterns on the same bits.  Returns
    ``(clauses, bits)``.
    """
    m = len(lits)
    if m == 0:
        return [], []
    if len(set(abs(l) for l in lits)) != m:
        raise ValueError("bitwise_amo needs distinct variables")
    bits = [new_var() for _ in range((m - 1).bit_length())]
    clauses = []
    for i, x in enumerate(lits):
        for j, b in enumerate(bits):
            clauses.append((-x, b) if (i >> j) & 1 else (-x, -b))
    return clauses, bits


def normalize_constraint(con) -> tuple:
    """Rewrite ``con`` as ``sum(c * lit) >= bound`` with every ``c > 0``.

    Works for constraints over literals and for OPB-style constraints over
    variables with signed coefficients.  Returns ``(terms, bound)``.
    """
    if con.relation == "=":
        raise TranslationError(f"equality constraint not supported: {con}")
    terms = list(con.terms)
    bound = con.bound
    if con.relation == "<=":
        terms = [(-c, lit) for c, lit in terms]
        bound = -bound
    out = []
    for c, lit in terms:
        if c < 0:
            out.append((-c, -lit))
            bound -= c
        elif c > 0:
            out.append((c, lit))
    return out, bound


def pb_to_wcnf(problem) -> WCNF:
    """Translate a :class:`~cudfopt.pbenc.PBProblem`."""
    return translate(problem.constraints, problem.objective.terms, problem.num_vars)


def translate(constraints: Iterable, objective_terms: Iterable, num_vars: int) -> WCNF:
    out = WCNF(num_vars=num_vars)

    def new_var():
        out.num_vars += 1
        return out.num_vars

    for con in constraints:
        if con.relation == "<=" and con.bound == 1 and all(c == 1 for c, _ in con.terms):
            terms = [(1, -lit) for _, lit in con.terms]
            bound = len(terms) - 1
        else:
            terms, bound = normalize_constraint(con)
        if bound <= 0:
            continue  # trivially satisfied
        coefs = {c for c, _ in terms}
        if not terms or (coefs == {1} and bound == 1 and con.relation != "<="):
            out.hard.append(tuple(lit for _, lit in terms))
        elif coefs == {1} and bound == len(terms) - 1:
            # sum of negations >= m-1  <=>  at most one of the original literals
            lits = [-lit for _, lit in terms]
            clauses, bits = bitwise_amo(lits, new_var)
            for j, b in enumerate(bits):
                out.aux_map[b] = (con.label or "amo", j)
            out.hard.extend(clauses)
        else:
            raise TranslationError(f"constraint is neither a clause nor at-most-one: {con}")
    for w, lit in objective_terms:
        if w < 0:  # OPB form: -w * x  ==  w * -x  minus a constant
            w, lit = -w, -lit
        if w:
            out.soft.append(SoftClause((-lit,), w))
    return out


def group_levels(wcnf: WCNF, level_sizes: Sequence[int], level_weights: Sequence[int] | None = None) -> list:
    """Partition soft clauses into strata of equal weight, heaviest first."""
    by_weight: dict = {}
    for s in wcnf.soft:
        by_weight.setdefault(s.weight, []).append(s)
    if level_weights is not None:
        stray = set(by_weight) - set(level_weights)
        if stray:
            raise TranslationError(f"soft weight {min(stray)} matches no level")
        weights = list(level_weights)
    else:
        present = sorted(by_weight, reverse=True)
        it = iter(present)
        weights = [next(it, None) if size else None for size in level_sizes]
        leftover = list(it)
        if leftover:
            raise TranslationError(f"soft weight {leftover[0]} matches no level")
    groups = []
    for size, w in zip(level_sizes, weights):
        members = tuple(by_weight.get(w, ())) if w is not None else ()
        if len(members) != size:
            raise TranslationError(f"level with weight {w} has {len(members)} soft clauses, expected {size}")
        groups.append(SoftGroup(w, members))
    return groups


# -- files -------------------------------------------------------------------


def write_wcnf(wcnf: WCNF) -> str:
    top = wcnf.top
    lines = [f"p wcnf {wcnf.num_vars} {len(wcnf.hard) + len(wcnf.soft)} {top}"]
    for var in sorted(wcnf.aux_map):
        label, bit = wcnf.aux_map[var]
        lines.append(f"c x{var} = aux bit {bit} for {label}")
    for c in wcnf.hard:
        lines.append(" ".join(map(str, (top, *c, 0))))
    for s in wcnf.soft:
        lines.append(" ".join(map(str, (s.weight, *s.clause, 0))))
    return "\n".join(lines) + "\n"


def read_wcnf(text: str) -> WCNF:
    out = WCNF()
    top = None
    for lineno, raw in enumerate(text.splitlines(), 1):
        parts = raw.split()
        if not parts:
            continue
        if parts[0] == "c":
            if len(parts) == 8 and parts[2:5] == ["=", "aux", "bit"]:
                out.aux_map[int(parts[1].lstrip("x"))] = (parts[7], int(parts[5]))
            continue
        if parts[0] == "p":
            if len(parts) != 5 or parts[1] != "wcnf":
                raise ValueError(f"line {lineno}: bad header {raw!r}")
            out.num_vars, top = int(parts[2]), int(parts[4])
            continue
        if top is None:
            raise ValueError(f"line {lineno}: clause before header")
        nums = [int(p) for p in parts]
        if nums[-1] != 0:
            raise ValueError(f"line {lineno}: clause not terminated by 0")
        weight, lits = nums[0], tuple(nums[1:-1])
        if weight >= top:
            out.hard.append(lits)
        else:
            out.soft.append(SoftClause(lits, weight))
    if top is None:
        raise ValueError("missing 'p wcnf' header")
    return out


def write_wcnf_map(wcnf: WCNF, opb_vars: int, opb_map_path: str | None = None) -> str:
    lines = [f"# opb-map: {opb_map_path}"] if opb_map_path else []
    for v in range(1, wcnf.num_vars + 1):
        if v <= opb_vars:
            lines.append(f"{v} x{v}")
        else:
            label, bit = wcnf.aux_map.get(v, ("aux", 0))
            lines.append(f"{v} aux {label} {bit}")
    return "\n".join(lines) + "\n"


def read_wcnf_map(text: str) -> tuple:
    """Returns ``(wcnf var -> opb var, opb map path or None)``."""
    mapping, opb_path = {}, None
    for raw in text.splitlines():
        if raw.startswith("# opb-map:"):
            opb_path = raw.split(":", 1)[1].strip()
            continue
        parts = raw.split()
        if len(parts) == 2 and parts[1].startswith("x"):
            mapping[int(parts[0])] = int(parts[1][1:])
    return mapping, opb_path
