"""Pseudo-Boolean encoding of an install request.

Literals are DIMACS-style signed integers: ``v`` is variable ``v`` true and
``-v`` its negation.  Variables are numbered densely from 1 in a fixed order
(packages sorted by name and version, then ``Root`` and ``Noop``, then the
criterion indicators grouped by kind and name) so that dumps are stable.

Hard constraints come in exactly two shapes, clauses and at-most-one
cardinalities, which is all the MaxSAT translation accepts.  Indicators are
reified one way only (condition implies indicator): the objective pushes them
down, so at an optimum they coincide with the conditions they stand for.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Sequence

from .model import (
    PARANOID,
    TRENDY,
    CRITERIA,
    PackageId,
    Profile,
    Request,
    Universe,
    conflict_targets,
    expand_constraint,
    initial_profile,
)

__all__ = [
    "PBConstraint",
    "Objective",
    "VarMap",
    "PBProblem",
    "LEVEL_KINDS",
    "clause",
    "at_most_one",
    "allocate",
    "encode_core",
    "encode_optional_installed",
    "encode_indicators",
    "build_objective",
    "encode",
    "lexicographic_dominance",
    "write_opb",
    "read_opb",
    "write_opb_map",
    "read_opb_map",
]

LEVEL_KINDS = {
    PARANOID: ("removed", "changed"),
    TRENDY: ("removed", "notuptodate", "new"),
}
_KIND_ORDER = ("removed", "changed", "notuptodate", "new")


@dataclass(frozen=True)
class PBConstraint:
    """``sum(coef * lit) <relation> bound`` over signed-integer literals."""

    terms: tuple
    relation: str = ">="
    bound: int = 1
    label: str | None = None

    def __post_init__(self):
        if self.relation not in (">=", "<=", "="):
            raise ValueError(f"bad relation {self.relation!r}")
        vars_ = [abs(lit) for _, lit in self.terms]
        if len(set(vars_)) != len(vars_):
            raise ValueError(f"variable repeated in constraint {self.terms}")

    @property
    def literals(self) -> tuple:
        return tuple(lit for _, lit in self.terms)

    def lhs(self, assignment) -> int:
        """``assignment`` maps variable -> bool (anything indexable by var)."""
        return sum(c for c, lit in self.terms if bool(assignment[abs(lit)]) == (lit > 0))

    def satisfied(self, assignment) -> bool:
        value = self.lhs(assignment)
        if self.relation == ">=":
            return value >= self.bound
        if self.relation == "<=":
            return value <= self.bound
        return value == self.bound

    def is_clause(self) -> bool:
        return self.relation == ">=" and self.bound == 1 and all(c == 1 for c, _ in self.terms)

    def is_at_most_one(self) -> bool:
        return self.relation == "<=" and self.bound == 1 and all(c == 1 for c, _ in self.terms)


def clause(lits: Iterable[int], label: str | None = None) -> PBConstraint:
    return PBConstraint(tuple((1, lit) for lit in lits), ">=", 1, label)


def at_most_one(lits: Iterable[int], label: str | None = None) -> PBConstraint:
    return PBConstraint(tuple((1, lit) for lit in lits), "<=", 1, label)


@dataclass(frozen=True)
class Objective:
    """Minimize ``sum(weight * lit)``; weights are Python ints (unbounded)."""

    terms: tuple

    def __post_init__(self):
        if any(w <= 0 for w, _ in self.terms):
            raise ValueError("objective weights must be positive")
        vars_ = [abs(lit) for _, lit in self.terms]
        if len(set(vars_)) != len(vars_):
            raise ValueError("variable repeated in objective")

    def value(self, assignment) -> int:
        return sum(w for w, lit in self.terms if bool(assignment[abs(lit)]) == (lit > 0))


@dataclass
class VarMap:
    package_var: dict = field(default_factory=dict)
    indicator_var: dict = field(default_factory=dict)
    root: int = 0
    noop: int = 0
    num_vars: int = 0

    def package_of(self) -> dict:
        """Inverse of ``package_var``."""
        return {v: pid for pid, v in self.package_var.items()}

    def names(self) -> dict:
        """Variable -> label used in the OPB sidecar mapping."""
        out = {v: f"{pid.name} {pid.version}" for pid, v in self.package_var.items()}
        out.update({v: f"indicator:{k}:{n}" for (k, n), v in self.indicator_var.items()})
        out[self.root] = "root"
        out[self.noop] = "noop"
        return out


@dataclass(frozen=True)
class PBProblem:
    constraints: tuple
    objective: Objective
    varmap: VarMap
    criterion: str
    level_sizes: tuple
    level_weights: tuple
    level_vars: tuple  # per level, the indicator variables in objective order

    @property
    def num_vars(self) -> int:
        return self.varmap.num_vars


def _indicator_names(universe: Universe, criterion: str) -> dict:
    installed = set(universe.installed_names())
    names = list(universe.by_name)
    picked = {
        "removed": [n for n in names if n in installed],
        "changed": names if criterion == PARANOID else [],
        "notuptodate": names if criterion == TRENDY else [],
        "new": [n for n in names if n not in installed] if criterion == TRENDY else [],
    }
    return picked


def allocate(universe: Universe, criterion: str) -> VarMap:
    """Deterministic variable numbering for ``universe`` under ``criterion``."""
    if criterion not in CRITERIA:
        raise ValueError(f"unknown criterion {criterion!r}")
    vm = VarMap()
    nxt = 1
    for pid in universe.rules:  # already sorted by (name, version)
        vm.package_var[pid] = nxt
        nxt += 1
    vm.root, vm.noop = nxt, nxt + 1
    nxt += 2
    picked = _indicator_names(universe, criterion)
    for kind in _KIND_ORDER:
        for name in picked[kind]:
            vm.indicator_var[(kind, name)] = nxt
            nxt += 1
    vm.num_vars = nxt - 1
    return vm


def encode_core(universe: Universe, request: Request, varmap: VarMap) -> list:
    """Dependencies, conflicts, version exclusivity and the request itself."""
    pv = varmap.package_var
    out = []
    for rule in universe:
        x = pv[rule.id]
        for dep in rule.depends:
            targets = set()
            for name, vc in dep.alternatives:
                targets |= expand_constraint(universe, name, vc)
            if rule.id in targets:
                continue  # tautology: the package satisfies its own dependency
            out.append(clause([-x] + [pv[t] for t in sorted(targets)]))
    pairs = set()
    for rule in universe:
        exclusive = rule.name in universe.exclusive_names
        for target in conflict_targets(universe, rule):
            if exclusive and target.name == rule.name:
                continue  # covered by the cardinality constraint
            pairs.add((min(rule.id, target), max(rule.id, target)))
    for a, b in sorted(pairs):
        out.append(clause([-pv[a], -pv[b]]))
    for name in sorted(universe.exclusive_names):
        versions = universe.by_name[name]
        if len(versions) > 1:
            out.append(at_most_one([pv[PackageId(name, v)] for v in versions], label=name))
    for name, vc in request.install:
        targets = expand_constraint(universe, name, vc)
        out.append(clause([pv[t] for t in sorted(targets)], label="request"))
    return out


def encode_optional_installed(universe: Universe, varmap: VarMap) -> list:
    """Keep as many installed packages as possible without forcing any."""
    installed = [varmap.package_var[r.id] for r in universe if r.installed]
    if not installed:
        return []
    root, noop = varmap.root, varmap.noop
    out = [clause([root]), clause([-root] + installed + [noop])]
    out.extend(clause([-noop, -x]) for x in installed)
    return out


def encode_indicators(universe: Universe, initial: Profile, varmap: VarMap, criterion: str) -> list:
    pv = varmap.package_var
    iv = varmap.indicator_var
    out = []
    for (kind, name), ind in iv.items():
        versions = [PackageId(name, v) for v in universe.by_name[name]]
        if kind == "removed":
            out.append(clause([ind] + [pv[p] for p in versions]))
        elif kind == "changed":
            for p in versions:
                out.append(clause([ind, pv[p]] if p in initial else [ind, -pv[p]]))
        elif kind == "notuptodate":
            newest = pv[versions[-1]]
            for p in versions[:-1]:
                out.append(clause([ind, -pv[p], newest]))
        elif kind == "new":
            for p in versions:
                out.append(clause([ind, -pv[p]]))
    return out


def _base(universe: Universe, level_sizes: Sequence[int]) -> int:
    return max([universe.name_count + 1] + [n + 1 for n in level_sizes[1:]])


def build_objective(universe: Universe, varmap: VarMap, criterion: str) -> tuple:
    """Return ``(objective, level_sizes, level_weights, level_vars)``."""
    kinds = LEVEL_KINDS[criterion]
    level_vars = tuple(
        tuple(v for (k, _), v in varmap.indicator_var.items() if k == kind) for kind in kinds
    )
    sizes = tuple(len(vs) for vs in level_vars)
    base = _base(universe, sizes)
    depth = len(kinds)
    weights = tuple(base ** (depth - 1 - i) for i in range(depth))
    terms = tuple((w, v) for w, vs in zip(weights, level_vars) for v in vs)
    return Objective(terms), sizes, weights, level_vars


def encode(universe: Universe, request: Request, criterion: str) -> PBProblem:
    varmap = allocate(universe, criterion)
    initial = initial_profile(universe)
    constraints = (
        encode_core(universe, request, varmap)
        + encode_optional_installed(universe, varmap)
        + encode_indicators(universe, initial, varmap, criterion)
    )
    objective, sizes, weights, level_vars = build_objective(universe, varmap, criterion)
    return PBProblem(tuple(constraints), objective, varmap, criterion, sizes, weights, level_vars)


def lexicographic_dominance(level_sizes: Sequence[int], level_weights: Sequence[int]) -> bool:
    """Each level's weight exceeds the largest possible total of all lower levels."""
    for k, w in enumerate(level_weights):
        tail = sum(s * lw for s, lw in zip(level_sizes[k + 1:], level_weights[k + 1:]))
        if w <= tail:
            return False
    return True


# -- OPB files ---------------------------------------------------------------


def _normalize(terms) -> tuple:
    """Rewrite literal terms over positive variables: returns (var terms, constant)."""
    out, const = [], 0
    for c, lit in terms:
        if lit > 0:
            out.append((c, lit))
        else:
            out.append((-c, -lit))
            const += c
    return out, const


def _fmt_terms(terms) -> str:
    return " ".join(f"{c:+d} x{v}" for c, v in terms)


def write_opb(problem: PBProblem) -> str:
    lines = [f"* #variable= {problem.num_vars} #constraint= {len(problem.constraints)}"]
    obj_terms, offset = _normalize(problem.objective.terms)
    lines.append(f"* criterion: {problem.criterion}")
    lines.append("* levels: " + " ".join(f"{s}@{w}" for s, w in zip(problem.level_sizes, problem.level_weights)))
    if offset:
        lines.append(f"* objective offset: {offset}")
    lines.append(f"min: {_fmt_terms(obj_terms)} ;")
    for con in problem.constraints:
        terms, const = _normalize(con.terms)
        rel, bound = con.relation, con.bound - const
        if rel == "<=":
            terms = [(-c, v) for c, v in terms]
            rel, bound = ">=", -bound
        suffix = f" * {con.label}" if con.label else ""
        lines.append(f"{_fmt_terms(terms)} {rel} {bound} ;{suffix}".lstrip())
    return "\n".join(lines) + "\n"


def read_opb(text: str) -> tuple:
    """Parse an OPB document; returns ``(constraints, objective_terms, offset)``.

    Constraints come back over positive variables in ``>=``/``=`` form, so a
    clause ``-a | b`` reads as ``-1 xa +1 xb >= 0``.
    """
    constraints, objective, offset = [], (), 0
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if not line:
            continue
        if line.startswith("*"):
            if line.startswith("* objective offset:"):
                offset = int(line.split(":", 1)[1])
            continue
        body, _, comment = line.partition(";")
        label = comment.strip().lstrip("*").strip() or None
        parts = body.split()
        if parts and parts[0] == "min:":
            objective = tuple(_read_terms(parts[1:], lineno))
            continue
        if len(parts) < 2 or parts[-2] not in (">=", "="):
            raise ValueError(f"line {lineno}: malformed constraint {line!r}")
        terms = _read_terms(parts[:-2], lineno)
        constraints.append(PBConstraint(tuple(terms), parts[-2], int(parts[-1]), label))
    return constraints, objective, offset


def _read_terms(parts, lineno) -> list:
    if len(parts) % 2:
        raise ValueError(f"line {lineno}: odd number of tokens in term list")
    terms = []
    for coef, var in zip(parts[0::2], parts[1::2]):
        if not var.startswith("x"):
            raise ValueError(f"line {lineno}: expected variable, got {var!r}")
        terms.append((int(coef), int(var[1:])))
    return terms


def write_opb_map(varmap: VarMap) -> str:
    names = varmap.names()
    return "".join(f"x{v} {names[v]}\n" for v in range(1, varmap.num_vars + 1))


def read_opb_map(text: str) -> dict:
    """Map OPB variable -> PackageId, ``("indicator", kind, name)``, "root" or "noop"."""
    out = {}
    for raw in text.splitlines():
        parts = raw.split()
        if not parts:
            continue
        var = int(parts[0].lstrip("x"))
        if len(parts) == 3:
            out[var] = PackageId(parts[1], int(parts[2]))
        elif parts[1].startswith("indicator:"):
            _, kind, name = parts[1].split(":", 2)
            out[var] = ("indicator", kind, name)
        else:
            out[var] = parts[1]
    return out
