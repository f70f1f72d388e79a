"""Seeded random universes for tests and benchmarks.

Every name gets between one and ``max_versions`` versions and an unversioned
self-conflict.  Dependencies and conflicts point at random names with random
version constraints; a small share of dependency alternatives name packages
that do not exist.  Installed versions are drawn independently and are not
repaired, so the initial installation is often inconsistent.
"""

from __future__ import annotations

import random

from .model import (
    ANY,
    DependencyClause,
    PackageId,
    PackageRule,
    Request,
    Universe,
    VersionConstraint,
    render_universe,
)

__all__ = ["generate", "generate_text"]

_OPS = ("any", "any", "any", ">=", ">=", "=", "<", "!=")


def _constraint(rng: random.Random, top: int) -> VersionConstraint:
    op = rng.choice(_OPS)
    if op == "any":
        return ANY
    return VersionConstraint(op, rng.randint(1, top))


def _binomial(rng: random.Random, trials: int, p: float) -> int:
    return sum(rng.random() < p for _ in range(trials))


def generate(
    seed: int,
    n_names: int,
    max_versions: int,
    dep_density: float = 0.4,
    conflict_density: float = 0.1,
    installed_fraction: float = 0.3,
    absent_fraction: float = 0.05,
    max_depends: int = 3,
) -> tuple:
    """Returns ``(Universe, Request)``; identical arguments give identical output."""
    if n_names < 1 or max_versions < 1:
        raise ValueError("n_names and max_versions must be positive")
    for label, p in (("dep_density", dep_density), ("conflict_density", conflict_density),
                     ("installed_fraction", installed_fraction), ("absent_fraction", absent_fraction)):
        if not 0.0 <= p <= 1.0:
            raise ValueError(f"{label} must lie in [0, 1], got {p}")
    rng = random.Random(seed)
    width = len(str(n_names - 1))
    names = [f"pkg{i:0{width}d}" for i in range(n_names)]
    counts = {n: rng.randint(1, max_versions) for n in names}
    installed = {}
    for n in names:
        if rng.random() < installed_fraction:
            installed[n] = rng.randint(1, counts[n])

    def target():
        if rng.random() < absent_fraction:
            return (f"ghost{rng.randint(0, 9)}", _constraint(rng, max_versions))
        other = rng.choice(names)
        return (other, _constraint(rng, counts[other]))

    rules = []
    for n in names:
        for v in range(1, counts[n] + 1):
            depends = []
            for _ in range(_binomial(rng, max_depends, dep_density)):
                alts = [target() for _ in range(1 + (rng.random() < 0.3))]
                alts = [a for a in alts if a[0] != n] or [target()]
                if alts[0][0] == n:
                    continue
                depends.append(DependencyClause(tuple(alts)))
            conflicts = [(n, ANY)]
            for _ in range(_binomial(rng, 2, conflict_density)):
                other = rng.choice(names)
                if other != n:
                    conflicts.append((other, _constraint(rng, counts[other])))
            rules.append(PackageRule(PackageId(n, v), tuple(depends), tuple(conflicts), installed.get(n) == v))
    fresh = [n for n in names if n not in installed]
    if fresh:
        want = rng.choice(fresh)
        top = counts[want]
        vc = rng.choice([ANY, VersionConstraint("=", rng.randint(1, top)), VersionConstraint(">=", rng.randint(1, top))])
    else:
        # every name has an installed version: ask for a version that is not installed
        upgradable = [n for n in names if counts[n] > 1] or names
        want = rng.choice(upgradable)
        others = [v for v in range(1, counts[want] + 1) if v != installed[want]]
        vc = VersionConstraint("=", rng.choice(others)) if others else ANY
    return Universe(rules), Request(((want, vc),))


def generate_text(*args, **kwargs) -> str:
    universe, request = generate(*args, **kwargs)
    return render_universe(universe, request)
