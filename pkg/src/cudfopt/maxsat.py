"""Core-guided partial weighted MaxSAT with lexicographic and aggregate modes.

Lexicographic mode optimizes one weight stratum at a time.  Within a stratum
all soft clauses share a weight, so the stratum is a plain partial MaxSAT
instance solved Fu-Malik style: every unsatisfiable core costs one unit and
its soft clauses each receive a fresh relaxation variable, with an
at-most-one constraint over the new relaxation variables.  When a stratum is
done, its relaxed soft clauses are declared hard before the next one starts,
so weights never enter the search.

Aggregate mode ignores strata and runs a linear search on the total weighted
cost: find a model, forbid every model that is not strictly cheaper, repeat
until unsatisfiable.

Both modes are anytime.  Under a time budget they return the best model found
so far; in lexicographic mode the strata finished before the budget ran out
are still proven optimal.
"""

from __future__ import annotations

import logging
import time
from dataclasses import dataclass, field
from typing import Callable, Sequence

from .card import WeightedBound
from .model import PackageId, Profile
from .sat import INTERRUPTED, SAT, UNSAT, CancelToken, Solver
from .wcnf import WCNF, SoftGroup, bitwise_amo

__all__ = [
    "OPTIMAL",
    "BEST_EFFORT",
    "UNSATISFIABLE",
    "INTERRUPTED_STATUS",
    "LevelResult",
    "SolveReport",
    "solve_uniform_level",
    "solve_lexicographic",
    "solve_aggregate",
    "decode",
    "level_costs",
    "solve_wcnf_text",
]

log = logging.getLogger(__name__)

OPTIMAL = "Optimal"
BEST_EFFORT = "BestEffort"
UNSATISFIABLE = "Unsatisfiable"
INTERRUPTED_STATUS = "Interrupted"

DEFAULT_TIMEOUT = 300.0


@dataclass
class LevelResult:
    index: int
    cost: int
    model: list | None
    proven: bool


@dataclass
class SolveReport:
    mode: str
    status: str
    levels: list = field(default_factory=list)
    final_model: list | None = None
    stats: dict = field(default_factory=dict)
    history: list = field(default_factory=list)  # per-level violation counts of each improving model

    @property
    def costs(self) -> tuple:
        return tuple(level.cost for level in self.levels)


def _violated(clause, model) -> bool:
    return not any(model[abs(l)] == (l > 0) for l in clause)


def level_costs(model, groups: Sequence[SoftGroup]) -> tuple:
    """Number of falsified soft clauses in each group."""
    return tuple(sum(1 for s in g.clauses if _violated(s.clause, model)) for g in groups)


class _Polisher:
    """Greedy repair that satisfies unit soft clauses when no hard clause objects.

    A solver model may set an indicator true although nothing forces it; flipping
    such a variable keeps every hard clause satisfied and lowers the cost.
    """

    def __init__(self, wcnf: WCNF):
        self.wcnf = wcnf
        self.occ: dict = {}
        for c in wcnf.hard:
            for lit in c:
                self.occ.setdefault(lit, []).append(c)
        self.soft_occ: dict = {}
        for s in wcnf.soft:
            for lit in s.clause:
                self.soft_occ.setdefault(lit, []).append(s.clause)

    def __call__(self, model: list) -> list:
        model = list(model[: self.wcnf.num_vars + 1])
        for s in self.wcnf.soft:
            if len(s.clause) != 1:
                continue
            lit = s.clause[0]
            if model[abs(lit)] == (lit > 0):
                continue
            v = abs(lit)
            model[v] = lit > 0
            blocked = any(_violated(c, model) for c in self.occ.get(-lit, ()))
            blocked = blocked or any(_violated(c, model) for c in self.soft_occ.get(-lit, ()))
            if blocked:
                model[v] = not model[v]
        return model


class _Run:
    """Bookkeeping shared by both modes: deadline, statistics, progress."""

    def __init__(self, wcnf, timeout, cancel, progress, seed):
        self.wcnf = wcnf
        self.start = time.monotonic()
        self.deadline = None if timeout is None else self.start + timeout
        self.cancel = cancel
        self.progress = progress
        self.solver = Solver(wcnf.num_vars, seed=seed)
        for c in wcnf.hard:
            self.solver.add_clause(c)
        self.polish = _Polisher(wcnf)
        self.calls = 0
        self.cores = 0
        self.history: list = []

    def solve(self, assumptions=()):
        self.calls += 1
        return self.solver.solve(assumptions, self.deadline, self.cancel)

    def record(self, vector: tuple, model):
        if self.history and vector >= self.history[-1]:
            return
        self.history.append(vector)
        if self.progress is not None:
            self.progress(vector, model)

    def stats(self) -> dict:
        out = {"solver_calls": self.calls, "cores": self.cores, "wall_time": time.monotonic() - self.start}
        out.update(self.solver.stats)
        return out


class _FuMalik:
    """Core-guided minimization of the number of falsified soft clauses.

    Each soft clause is tracked as ``[literals so far, assumption literal]``.
    A unit soft clause is assumed directly; a longer one gets a selector.
    Every core relaxes its members with fresh variables tied by an
    at-most-one constraint and raises the cost by one.
    """

    def __init__(self, run: _Run, softs: Sequence[tuple]):
        self.run = run
        self.cost = 0
        self.entries = []
        solver = run.solver
        for c in softs:
            if len(c) == 1:
                self.entries.append([list(c), c[0]])
            else:
                sel = solver.new_var()
                solver.add_clause(list(c) + [-sel])
                self.entries.append([list(c), sel])

    def minimize(self) -> tuple:
        """Run until the relaxed softs are satisfiable.  Returns (status, model)."""
        run, solver = self.run, self.run.solver
        while True:
            out = run.solve([e[1] for e in self.entries])
            if out.status != UNSAT:
                return out.status, out.model
            core = set(out.core)
            hit = [e for e in self.entries if e[1] in core]
            if not hit:
                return UNSAT, None
            relax = []
            for e in hit:
                r, sel = solver.new_var(), solver.new_var()
                e[0].append(r)
                solver.add_clause(e[0] + [-sel])
                e[1] = sel
                relax.append(r)
            clauses, _ = bitwise_amo(relax, solver.new_var)
            for c in clauses:
                solver.add_clause(c)
            self.cost += 1
            run.cores += 1

    def harden(self):
        """Make every relaxed soft clause hard.

        A falsified soft clause needs one of its own relaxation variables,
        and each core admits at most one, so from here on no model falsifies
        more than ``cost`` of these clauses.
        """
        for _, assume in self.entries:
            self.run.solver.add_clause([assume])


def _violation_literals(solver: Solver, softs: Sequence[tuple]) -> list:
    """One literal per soft clause, implied true whenever that clause is falsified."""
    out = []
    for c in softs:
        if len(c) == 1:
            out.append(-c[0])
        else:
            v = solver.new_var()
            solver.add_clause(list(c) + [v])
            out.append(v)
    return out


def solve_uniform_level(hard, softs, timeout: float | None = DEFAULT_TIMEOUT, cancel: CancelToken | None = None) -> LevelResult:
    """Partial MaxSAT over ``hard`` clauses and equally weighted ``softs``.

    Raises nothing; an unsatisfiable hard part yields ``cost=None``.
    """
    hard = [tuple(c) for c in hard]
    softs = [tuple(c) for c in softs]
    nv = max([abs(l) for c in hard + softs for l in c], default=0)
    from .wcnf import SoftClause

    wcnf = WCNF(num_vars=nv, hard=hard, soft=[SoftClause(c, 1) for c in softs])
    report = solve_lexicographic(wcnf, [SoftGroup(1, tuple(wcnf.soft))], timeout=timeout, cancel=cancel)
    if report.status == UNSATISFIABLE:
        return LevelResult(0, None, None, True)
    if not report.levels:
        return LevelResult(0, None, None, False)
    return report.levels[0]


def solve_lexicographic(
    wcnf: WCNF,
    levels: Sequence[SoftGroup],
    timeout: float | None = DEFAULT_TIMEOUT,
    cancel: CancelToken | None = None,
    progress: Callable | None = None,
    seed: int = 0,
) -> SolveReport:
    """Optimize ``levels`` (heaviest first) one after another.

    Each level is plain partial MaxSAT over the current clause database.
    Once a level is solved with cost ``u`` its relaxed soft clauses become
    hard, which caps that level at ``u`` violations for every later level.
    """
    run = _Run(wcnf, timeout, cancel, progress, seed)
    first = run.solve()
    if first.status != SAT:
        status = UNSATISFIABLE if first.status == UNSAT else INTERRUPTED_STATUS
        return SolveReport("lexicographic", status, stats=run.stats())
    best = run.polish(first.model)
    run.record(level_costs(best, levels), best)
    results = []
    status = OPTIMAL
    for k, group in enumerate(levels):
        level = _FuMalik(run, [s.clause for s in group.clauses])
        outcome, model = level.minimize()
        if outcome == UNSAT:  # cannot happen once the hard part was satisfiable
            raise RuntimeError("hard clauses became unsatisfiable while optimizing a level")
        if outcome == INTERRUPTED:
            status = BEST_EFFORT
            bounds = level_costs(best, levels)
            results.extend(LevelResult(j, bounds[j], best, False) for j in range(k, len(levels)))
            log.info("budget exhausted on level %d; returning best model", k)
            break
        best = run.polish(model)
        achieved = level_costs(best, levels)
        if achieved[k] != level.cost:
            raise RuntimeError(f"level {k}: model violates {achieved[k]} softs, core count is {level.cost}")
        run.record(achieved, best)
        results.append(LevelResult(k, level.cost, best, True))
        log.debug("level %d optimal with cost %d", k, level.cost)
        level.harden()
    return SolveReport("lexicographic", status, results, best, run.stats(), run.history)


def solve_aggregate(
    wcnf: WCNF,
    levels: Sequence[SoftGroup] | None = None,
    timeout: float | None = DEFAULT_TIMEOUT,
    cancel: CancelToken | None = None,
    progress: Callable | None = None,
    seed: int = 0,
) -> SolveReport:
    """Linear search on the total weight of falsified soft clauses.

    ``levels`` only shapes the progress history; the search itself sees the
    single weighted sum.
    """
    run = _Run(wcnf, timeout, cancel, progress, seed)
    groups = list(levels) if levels is not None else None

    def vector(model):
        return level_costs(model, groups) if groups is not None else (wcnf.cost(model),)

    out = run.solve()
    if out.status != SAT:
        status = UNSATISFIABLE if out.status == UNSAT else INTERRUPTED_STATUS
        return SolveReport("aggregate", status, stats=run.stats())
    strata: dict = {}
    for s in wcnf.soft:
        strata.setdefault(s.weight, []).append(s.clause)
    bound = None
    best, best_cost = None, None
    status = OPTIMAL
    while True:
        model = run.polish(out.model)
        cost = wcnf.cost(model)
        if best_cost is None or cost < best_cost:
            best, best_cost = model, cost
            run.record(vector(best), best)
        if best_cost == 0:
            break
        if bound is None:
            ordered = sorted(strata.items(), reverse=True)
            bound = WeightedBound(
                [(w, _violation_literals(run.solver, cls)) for w, cls in ordered], run.solver.new_var
            )
        for c in bound.bound(best_cost - 1):
            run.solver.add_clause(c)
        out = run.solve()
        if out.status == UNSAT:
            break
        if out.status == INTERRUPTED:
            status = BEST_EFFORT
            break
    levels_out = [LevelResult(0, best_cost, best, status == OPTIMAL)]
    return SolveReport("aggregate", status, levels_out, best, run.stats(), run.history)


def decode(model, package_of: dict, wcnf_to_opb: dict | None = None) -> Profile:
    """Installed packages of ``model``; non-package variables are ignored.

    ``package_of`` maps OPB variable -> PackageId (other entries are skipped);
    ``wcnf_to_opb`` translates model variables first when given.
    """
    members = []
    for var in range(1, len(model)):
        if not model[var]:
            continue
        opb_var = wcnf_to_opb.get(var) if wcnf_to_opb is not None else var
        pid = package_of.get(opb_var)
        if isinstance(pid, PackageId):
            members.append(pid)
    return Profile(members)


def solve_wcnf_text(text: str, timeout: float | None = DEFAULT_TIMEOUT) -> str:
    """Standalone mode over a ``p wcnf`` document: ``o``/``s``/``v`` lines."""
    from .wcnf import read_wcnf

    wcnf = read_wcnf(text)
    lines = []
    report = solve_aggregate(wcnf, timeout=timeout, progress=lambda vec, _m: lines.append(f"o {vec[0]}"))
    if report.status == UNSATISFIABLE:
        lines.append("s UNSATISFIABLE")
    elif report.status == INTERRUPTED_STATUS:
        lines.append("s UNKNOWN")
    else:
        lines.append("s OPTIMUM FOUND" if report.status == OPTIMAL else "s SATISFIABLE")
        m = report.final_model
        lines.append("v " + " ".join(str(v if m[v] else -v) for v in range(1, wcnf.num_vars + 1)))
    return "\n".join(lines) + "\n"
