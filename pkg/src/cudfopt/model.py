"""Package universes, install requests and installation profiles.

A universe is a finite set of package rules.  Each rule names one package
version, lists its dependency clauses (disjunctions of versioned package
references) and its conflicts.  Versions are positive integers.

The text format is a small stanza language::

    package: p
    version: 2
    depends: a | b (>= 2), c
    conflicts: p, q (= 1)
    installed: true

    request:
    install: p (= 2)

Everything here is pure and immutable; the rest of the package treats these
types as ground truth.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Iterable, Mapping

__all__ = [
    "CudfError",
    "PARANOID",
    "TRENDY",
    "CRITERIA",
    "PackageId",
    "VersionConstraint",
    "DependencyClause",
    "PackageRule",
    "Universe",
    "Request",
    "Profile",
    "CriteriaVector",
    "Violation",
    "parse_universe",
    "parse_solution",
    "render_universe",
    "render_solution",
    "latest",
    "expand_constraint",
    "initial_profile",
    "validate_profile",
    "evaluate_criteria",
]

PARANOID = "paranoid"
TRENDY = "trendy"
CRITERIA = (PARANOID, TRENDY)

_NAME_RE = re.compile(r"[a-zA-Z0-9][a-zA-Z0-9.+-]*\Z")
_ALT_RE = re.compile(
    r"\s*([a-zA-Z0-9][a-zA-Z0-9.+-]*)\s*(?:\(\s*(=|!=|>=|<=|>|<)\s*(-?\d+)\s*\))?\s*\Z"
)


class CudfError(ValueError):
    """Malformed document or inconsistent universe.  ``line`` is 1-based."""

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


@dataclass(frozen=True, order=True)
class PackageId:
    name: str
    version: int

    def __post_init__(self):
        if not _NAME_RE.match(self.name):
            raise CudfError(f"invalid package name {self.name!r}")
        if self.version < 1:
            raise CudfError(f"version of {self.name} must be >= 1, got {self.version}")

    def __str__(self):
        return f"{self.name}@{self.version}"


_OPS = {
    "any": lambda v, b: True,
    "=": lambda v, b: v == b,
    "!=": lambda v, b: v != b,
    ">=": lambda v, b: v >= b,
    "<=": lambda v, b: v <= b,
    ">": lambda v, b: v > b,
    "<": lambda v, b: v < b,
}


@dataclass(frozen=True)
class VersionConstraint:
    op: str = "any"
    bound: int | None = None

    def __post_init__(self):
        if self.op not in _OPS:
            raise CudfError(f"unknown version operator {self.op!r}")
        if (self.op == "any") != (self.bound is None):
            raise CudfError(f"operator {self.op!r} with bound {self.bound!r}")
        if self.bound is not None and self.bound < 1:
            raise CudfError(f"version bound must be >= 1, got {self.bound}")

    def matches(self, version: int) -> bool:
        return _OPS[self.op](version, self.bound)

    def __str__(self):
        return "" if self.op == "any" else f"({self.op} {self.bound})"


ANY = VersionConstraint()

# (name, constraint) pair; used for dependency alternatives, conflicts and
# request entries alike.
Ref = tuple  # tuple[str, VersionConstraint]


def _ref_str(ref: Ref) -> str:
    name, vc = ref
    return f"{name} {vc}" if vc.op != "any" else name


@dataclass(frozen=True)
class DependencyClause:
    alternatives: tuple

    def __post_init__(self):
        if not self.alternatives:
            raise CudfError("dependency clause without alternatives")

    def __str__(self):
        return " | ".join(_ref_str(a) for a in self.alternatives)


@dataclass(frozen=True)
class PackageRule:
    id: PackageId
    depends: tuple = ()
    conflicts: tuple = ()
    installed: bool = False

    @property
    def name(self) -> str:
        return self.id.name

    @property
    def version(self) -> int:
        return self.id.version

    @property
    def self_exclusive(self) -> bool:
        """True when the rule carries an unversioned conflict on its own name."""
        return any(n == self.name and vc.op == "any" for n, vc in self.conflicts)


@dataclass(frozen=True)
class Request:
    install: tuple

    def __post_init__(self):
        if not self.install:
            raise CudfError("empty request")


@dataclass(frozen=True)
class Profile:
    members: frozenset = frozenset()

    def __init__(self, members: Iterable[PackageId] = ()):
        object.__setattr__(self, "members", frozenset(members))

    def __contains__(self, pid):
        return pid in self.members

    def __iter__(self):
        return iter(sorted(self.members))

    def __len__(self):
        return len(self.members)

    def names(self) -> set:
        return {pid.name for pid in self.members}


class Universe:
    """Finite set of package rules with a name -> sorted versions index."""

    def __init__(self, rules: Iterable[PackageRule]):
        table: dict = {}
        for rule in rules:
            if rule.id in table:
                raise CudfError(f"duplicate package {rule.id}")
            table[rule.id] = rule
        self._rules = {pid: table[pid] for pid in sorted(table)}
        by_name: dict = {}
        for pid in self._rules:
            by_name.setdefault(pid.name, []).append(pid.version)
        self._by_name = {n: tuple(vs) for n, vs in by_name.items()}
        self._exclusive = frozenset(r.name for r in self._rules.values() if r.self_exclusive)
        self._expand_cache: dict = {}

    @property
    def rules(self) -> Mapping:
        return self._rules

    @property
    def by_name(self) -> Mapping:
        return self._by_name

    @property
    def rule_count(self) -> int:
        return len(self._rules)

    @property
    def name_count(self) -> int:
        return len(self._by_name)

    @property
    def installed_count(self) -> int:
        return sum(1 for r in self._rules.values() if r.installed)

    @property
    def exclusive_names(self) -> frozenset:
        """Names for which at most one version may be installed."""
        return self._exclusive

    def installed_names(self) -> list:
        return sorted({r.name for r in self._rules.values() if r.installed})

    def __iter__(self):
        return iter(self._rules.values())

    def __len__(self):
        return len(self._rules)

    def __contains__(self, pid):
        return pid in self._rules

    def __getitem__(self, pid) -> PackageRule:
        return self._rules[pid]

    def __eq__(self, other):
        return isinstance(other, Universe) and self._rules == other._rules

    def __repr__(self):
        return f"Universe({self.rule_count} rules, {self.name_count} names)"


@dataclass(frozen=True)
class CriteriaVector:
    criterion: str
    values: tuple

    def __post_init__(self):
        expected = 2 if self.criterion == PARANOID else 3
        if self.criterion not in CRITERIA or len(self.values) != expected:
            raise ValueError(f"bad criteria vector {self.criterion} {self.values}")
        if any(v < 0 for v in self.values):
            raise ValueError(f"negative criterion value in {self.values}")

    def __lt__(self, other):
        return self.values < other.values

    def __le__(self, other):
        return self.values <= other.values

    def __iter__(self):
        return iter(self.values)

    def __str__(self):
        return "(" + ", ".join(str(v) for v in self.values) + ")"


@dataclass(frozen=True)
class Violation:
    kind: str  # depends | conflicts | exclusive | request | unknown
    package: PackageId | None
    detail: str

    def __str__(self):
        who = f"{self.package}: " if self.package is not None else ""
        return f"{self.kind}: {who}{self.detail}"


# -- queries -----------------------------------------------------------------


def latest(universe: Universe, name: str) -> int:
    try:
        return universe.by_name[name][-1]
    except KeyError:
        raise KeyError(f"unknown package name {name!r}") from None


def expand_constraint(universe: Universe, name: str, vc: VersionConstraint = ANY) -> frozenset:
    """All package ids of ``name`` in the universe whose version satisfies ``vc``."""
    key = (name, vc)
    hit = universe._expand_cache.get(key)
    if hit is None:
        versions = universe.by_name.get(name, ())
        hit = frozenset(PackageId(name, v) for v in versions if vc.matches(v))
        universe._expand_cache[key] = hit
    return hit


def conflict_targets(universe: Universe, rule: PackageRule) -> set:
    """Expanded conflicts of ``rule``, never including the rule itself."""
    out = set()
    for name, vc in rule.conflicts:
        out |= expand_constraint(universe, name, vc)
    out.discard(rule.id)
    return out


def initial_profile(universe: Universe) -> Profile:
    return Profile(r.id for r in universe if r.installed)


def validate_profile(universe: Universe, request: Request | None, profile: Profile) -> list:
    """Return the list of violations; an empty list means the profile is valid.

    Raises ``KeyError`` if a profile member is not in the universe.
    """
    members = profile.members
    for pid in members:
        if pid not in universe:
            raise KeyError(f"profile member {pid} not in universe")
    problems = []
    per_name: dict = {}
    for pid in sorted(members):
        rule = universe[pid]
        per_name.setdefault(pid.name, []).append(pid)
        for clause in rule.depends:
            if not any(expand_constraint(universe, n, vc) & members for n, vc in clause.alternatives):
                problems.append(Violation("depends", pid, f"unsatisfied dependency {clause}"))
        for other in sorted(conflict_targets(universe, rule) & members):
            problems.append(Violation("conflicts", pid, f"conflicts with installed {other}"))
    for name, pids in sorted(per_name.items()):
        if len(pids) > 1 and name in universe.exclusive_names:
            listing = ", ".join(str(p) for p in pids)
            problems.append(Violation("exclusive", None, f"several versions of {name}: {listing}"))
    if request is not None:
        for ref in request.install:
            if not expand_constraint(universe, *ref) & members:
                problems.append(Violation("request", None, f"request {_ref_str(ref)} not satisfied"))
    return problems


def _name_status(universe: Universe, members: frozenset) -> dict:
    return {name: frozenset(v for v in vs if PackageId(name, v) in members)
            for name, vs in universe.by_name.items()}


def evaluate_criteria(universe: Universe, initial: Profile, final: Profile, criterion: str) -> CriteriaVector:
    """Score the transition ``initial`` -> ``final`` per package name."""
    if criterion not in CRITERIA:
        raise ValueError(f"unknown criterion {criterion!r}")
    before = _name_status(universe, initial.members)
    after = _name_status(universe, final.members)
    removed = changed = notuptodate = new = 0
    for name, versions in universe.by_name.items():
        was, now = before[name], after[name]
        if was and not now:
            removed += 1
        if was != now:
            changed += 1
        if now and versions[-1] not in now:
            notuptodate += 1
        if not was and now:
            new += 1
    if criterion == PARANOID:
        return CriteriaVector(PARANOID, (removed, changed))
    return CriteriaVector(TRENDY, (removed, notuptodate, new))


# -- text format ---------------------------------------------------------------


def _parse_ref(text: str, lineno: int) -> Ref:
    m = _ALT_RE.match(text)
    if not m:
        raise CudfError(f"malformed package reference {text.strip()!r}", lineno)
    name, op, bound = m.groups()
    if op is None:
        return (name, ANY)
    try:
        return (name, VersionConstraint(op, int(bound)))
    except CudfError as exc:
        raise CudfError(str(exc), lineno) from None


def _parse_list(value: str, lineno: int) -> list:
    if not value.strip():
        raise CudfError("empty list", lineno)
    return [_parse_ref(part, lineno) for part in value.split(",")]


def _stanzas(text: str):
    """Yield lists of (lineno, key, value) for each blank-line separated stanza."""
    current = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if line.startswith("#"):
            continue
        if not line:
            if current:
                yield current
                current = []
            continue
        key, sep, value = line.partition(":")
        if not sep:
            raise CudfError(f"expected 'key: value', got {line!r}", lineno)
        current.append((lineno, key.strip(), value.strip()))
    if current:
        yield current


def _parse_package(stanza) -> PackageRule:
    fields: dict = {}
    for lineno, key, value in stanza:
        if key in fields:
            raise CudfError(f"repeated field {key!r}", lineno)
        fields[key] = (lineno, value)
    start = stanza[0][0]
    for key in ("package", "version"):
        if key not in fields:
            raise CudfError(f"stanza missing {key!r}", start)
    unknown = set(fields) - {"package", "version", "depends", "conflicts", "installed"}
    if unknown:
        key = sorted(unknown)[0]
        raise CudfError(f"unknown field {key!r}", fields[key][0])
    lineno, name = fields["package"]
    if not _NAME_RE.match(name):
        raise CudfError(f"invalid package name {name!r}", lineno)
    lineno, version = fields["version"]
    if not version.isdigit() or int(version) < 1:
        raise CudfError(f"version must be a positive integer, got {version!r}", lineno)
    depends: tuple = ()
    if "depends" in fields:
        lineno, value = fields["depends"]
        clauses = []
        for part in value.split(","):
            alts = tuple(_parse_ref(a, lineno) for a in part.split("|"))
            clauses.append(DependencyClause(alts))
        depends = tuple(clauses)
    conflicts: tuple = ()
    if "conflicts" in fields:
        conflicts = tuple(_parse_list(fields["conflicts"][1], fields["conflicts"][0]))
    installed = False
    if "installed" in fields:
        lineno, value = fields["installed"]
        if value not in ("true", "false"):
            raise CudfError(f"installed must be true or false, got {value!r}", lineno)
        installed = value == "true"
    return PackageRule(PackageId(name, int(version)), depends, conflicts, installed)


def parse_universe(text: str) -> tuple:
    """Parse a universe document; returns ``(Universe, Request)``."""
    rules = []
    seen: dict = {}
    request = None
    for stanza in _stanzas(text):
        lineno, key, value = stanza[0]
        if request is not None:
            raise CudfError("content after the request stanza", lineno)
        if key == "request":
            entries = [(ln, k, v) for ln, k, v in stanza[1:]]
            installs = [e for e in entries if e[1] == "install"]
            others = [e for e in entries if e[1] != "install"]
            if others:
                raise CudfError(f"unsupported request field {others[0][1]!r}", others[0][0])
            if not installs:
                raise CudfError("empty request", lineno)
            refs = []
            for ln, _, v in installs:
                refs.extend(_parse_list(v, ln))
            request = Request(tuple(refs))
            continue
        if key != "package":
            raise CudfError(f"stanza must start with 'package:' or 'request:', got {key!r}", lineno)
        rule = _parse_package(stanza)
        if rule.id in seen:
            raise CudfError(f"duplicate package {rule.id} (first at line {seen[rule.id]})", lineno)
        seen[rule.id] = lineno
        rules.append(rule)
    if request is None:
        raise CudfError("document has no request stanza")
    return Universe(rules), request


def _render_rule(rule: PackageRule, with_meta: bool = True) -> str:
    lines = [f"package: {rule.name}", f"version: {rule.version}"]
    if with_meta:
        if rule.depends:
            lines.append("depends: " + ", ".join(str(c) for c in rule.depends))
        if rule.conflicts:
            lines.append("conflicts: " + ", ".join(_ref_str(c) for c in rule.conflicts))
    if rule.installed:
        lines.append("installed: true")
    return "\n".join(lines) + "\n"


def render_universe(universe: Universe, request: Request) -> str:
    parts = [_render_rule(r) for r in universe]
    parts.append("request:\ninstall: " + ", ".join(_ref_str(r) for r in request.install) + "\n")
    return "\n".join(parts)


def render_solution(profile: Profile | None) -> str:
    """Solution stanzas sorted by (name, version); ``None`` renders as FAIL."""
    if profile is None:
        return "FAIL\n"
    return "\n".join(
        f"package: {pid.name}\nversion: {pid.version}\ninstalled: true\n" for pid in sorted(profile.members)
    )


def parse_solution(text: str) -> Profile | None:
    """Inverse of :func:`render_solution`; returns ``None`` for FAIL."""
    body = [ln for ln in text.splitlines() if ln.strip() and not ln.lstrip().startswith("#")]
    if body and body[0].strip() == "FAIL":
        return None
    members = []
    for stanza in _stanzas(text):
        fields = {k: (ln, v) for ln, k, v in stanza}
        if "package" not in fields or "version" not in fields:
            raise CudfError("solution stanza needs package and version", stanza[0][0])
        lineno, version = fields["version"]
        if not version.isdigit():
            raise CudfError(f"bad version {version!r}", lineno)
        members.append(PackageId(fields["package"][1], int(version)))
    return Profile(members)
