"""Incremental CDCL SAT solver with assumptions and unsat cores.

Two-literal watching (binary clauses kept in separate implication lists),
first-UIP learning with local minimization, VSIDS branching with phase saving,
Luby restarts and periodic deletion of learned clauses.

All assumptions are placed on a single decision level just above the root.
A conflict on that level means the assumptions are inconsistent with the
clause database; tracing the conflict back to the assumption literals gives
the core.  Backjumps that stay on or above the assumption level keep the
assumptions in place, which matters when there are tens of thousands of them.

Literals use the DIMACS convention at the interface.  Internally literal
``v`` is ``2*v`` and ``-v`` is ``2*v + 1``.
"""

from __future__ import annotations

import heapq
import threading
import time
from dataclasses import dataclass

__all__ = ["SAT", "UNSAT", "INTERRUPTED", "SatOutcome", "Solver", "CancelToken", "parse_dimacs", "solve_dimacs"]

SAT = "SAT"
UNSAT = "UNSAT"
INTERRUPTED = "INTERRUPTED"


class CancelToken:
    """Cooperative cancellation shared between threads."""

    def __init__(self):
        self._event = threading.Event()

    def cancel(self):
        self._event.set()

    @property
    def cancelled(self) -> bool:
        return self._event.is_set()


@dataclass
class SatOutcome:
    status: str
    model: list | None = None  # index by variable; model[0] unused
    core: list | None = None  # DIMACS assumption literals

    @property
    def sat(self) -> bool:
        return self.status == SAT

    def value(self, lit: int) -> bool:
        return self.model[abs(lit)] == (lit > 0)


def _luby(i: int) -> int:
    size, seq = 1, 0
    while size < i + 1:
        seq += 1
        size = 2 * size + 1
    while size - 1 != i:
        size = (size - 1) >> 1
        seq -= 1
        i %= size
    return 1 << seq


class Solver:
    """Incremental SAT solver; add clauses between :meth:`solve` calls."""

    restart_base = 100
    var_decay = 0.95

    def __init__(self, num_vars: int = 0, seed: int = 0):
        self.seed = seed
        self.num_vars = 0
        self.val = [0, 0]  # per internal literal: 1 true, -1 false, 0 unassigned
        self.level = [0]
        self.reason = [None]
        self.activity = [0.0]
        self.phase = [1]  # saved internal sign bit; 1 = negative
        self.in_heap = [False]
        self.watches = [[], []]
        self.bins = [[], []]
        self.heap: list = []
        self.trail: list = []
        self.trail_lim: list = []
        self.qhead = 0
        self.clauses: list = []
        self.learnts: list = []
        self.lbd: dict = {}
        self.var_inc = 1.0
        self.ok = True
        self.conflicts = 0
        self.decisions = 0
        self.propagations = 0
        self.solves = 0
        self.max_learnts = 2000
        self.ensure_vars(num_vars)

    # -- variables and clauses -------------------------------------------------

    def new_var(self) -> int:
        self.ensure_vars(self.num_vars + 1)
        return self.num_vars

    def ensure_vars(self, n: int):
        while self.num_vars < n:
            self.num_vars += 1
            v = self.num_vars
            self.val += [0, 0]
            self.level.append(0)
            self.reason.append(None)
            # deterministic perturbation so different seeds explore differently
            self.activity.append(((v * 2654435761 + self.seed) % 1000) * 1e-9 if self.seed else 0.0)
            self.phase.append(1)
            self.in_heap.append(True)
            self.watches += [[], []]
            self.bins += [[], []]
            heapq.heappush(self.heap, (-self.activity[v], v))

    def add_clause(self, lits) -> bool:
        """Add a clause (DIMACS literals).  Returns False once the database is UNSAT."""
        if not self.ok:
            return False
        if self.trail_lim:
            self._cancel_until(0)
        seen = set()
        out = []
        for lit in lits:
            v = abs(lit)
            if v > self.num_vars:
                self.ensure_vars(v)
            il = 2 * v + (lit < 0)
            if il ^ 1 in seen:
                return True  # tautology
            if il in seen:
                continue
            seen.add(il)
            value = self.val[il]
            if value == 1:
                return True  # satisfied at root
            if value == -1:
                continue  # false at root
            out.append(il)
        if not out:
            self.ok = False
            return False
        if len(out) == 1:
            self._assign(out[0], None)
            if self._propagate() is not None:
                self.ok = False
            return self.ok
        self._attach(out)
        self.clauses.append(out)
        return True

    def _attach(self, c):
        if len(c) == 2:
            a, b = c
            self.bins[a].append((b, c))
            self.bins[b].append((a, c))
        else:
            self.watches[c[0]].append(c)
            self.watches[c[1]].append(c)

    # -- core loop ---------------------------------------------------------------

    def _assign(self, lit, reason):
        v = lit >> 1
        self.val[lit] = 1
        self.val[lit ^ 1] = -1
        self.level[v] = len(self.trail_lim)
        self.reason[v] = reason
        self.trail.append(lit)

    def _propagate(self):
        val = self.val
        trail = self.trail
        level = self.level
        reason = self.reason
        watches = self.watches
        bins = self.bins
        dl = len(self.trail_lim)
        qhead = self.qhead
        confl = None
        while qhead < len(trail):
            false_lit = trail[qhead] ^ 1
            qhead += 1
            for other, c in bins[false_lit]:
                vo = val[other]
                if vo == 1:
                    continue
                if vo == -1:
                    confl = c
                    break
                val[other] = 1
                val[other ^ 1] = -1
                level[other >> 1] = dl
                reason[other >> 1] = c
                trail.append(other)
            if confl is not None:
                break
            ws = watches[false_lit]
            i = j = 0
            n = len(ws)
            while i < n:
                c = ws[i]
                i += 1
                if c[0] == false_lit:
                    c[0] = c[1]
                    c[1] = false_lit
                first = c[0]
                if val[first] == 1:
                    ws[j] = c
                    j += 1
                    continue
                for k in range(2, len(c)):
                    lk = c[k]
                    if val[lk] != -1:
                        c[1] = lk
                        c[k] = false_lit
                        watches[lk].append(c)
                        break
                else:
                    ws[j] = c
                    j += 1
                    if val[first] == -1:
                        confl = c
                        while i < n:
                            ws[j] = ws[i]
                            j += 1
                            i += 1
                        break
                    val[first] = 1
                    val[first ^ 1] = -1
                    level[first >> 1] = dl
                    reason[first >> 1] = c
                    trail.append(first)
            del ws[j:]
            if confl is not None:
                break
        self.propagations += qhead - self.qhead
        self.qhead = len(trail) if confl is None else qhead
        return confl

    def _cancel_until(self, lvl):
        if len(self.trail_lim) <= lvl:
            return
        trail = self.trail
        val = self.val
        phase = self.phase
        in_heap = self.in_heap
        heap = self.heap
        activity = self.activity
        start = self.trail_lim[lvl]
        for idx in range(len(trail) - 1, start - 1, -1):
            lit = trail[idx]
            v = lit >> 1
            val[lit] = 0
            val[lit ^ 1] = 0
            self.reason[v] = None
            phase[v] = lit & 1
            if not in_heap[v]:
                in_heap[v] = True
                heapq.heappush(heap, (-activity[v], v))
        del trail[start:]
        del self.trail_lim[lvl:]
        self.qhead = start

    def _bump(self, v):
        act = self.activity
        act[v] += self.var_inc
        if act[v] > 1e100:
            for i in range(1, self.num_vars + 1):
                act[i] *= 1e-100
            self.var_inc *= 1e-100
            self.heap = [(-act[i], i) for i in range(1, self.num_vars + 1) if self.in_heap[i]]
            heapq.heapify(self.heap)
        elif self.in_heap[v]:
            heapq.heappush(self.heap, (-act[v], v))
            if len(self.heap) > 4 * self.num_vars + 1000:
                self.heap = [(-act[i], i) for i in range(1, self.num_vars + 1) if self.in_heap[i]]
                heapq.heapify(self.heap)

    def _analyze(self, confl):
        """First-UIP learning.  Returns (learnt clause, backjump level)."""
        level = self.level
        reason = self.reason
        trail = self.trail
        dl = len(self.trail_lim)
        seen = {}
        learnt = [0]
        path = 0
        p_var = 0
        idx = len(trail) - 1
        c = confl
        while True:
            for q in c:
                v = q >> 1
                if v == p_var or v in seen or level[v] == 0:
                    continue
                seen[v] = True
                self._bump(v)
                if level[v] >= dl:
                    path += 1
                else:
                    learnt.append(q)
            while (trail[idx] >> 1) not in seen:
                idx -= 1
            p = trail[idx]
            idx -= 1
            p_var = p >> 1
            c = reason[p_var]
            path -= 1
            if path == 0:
                break
            del seen[p_var]
        learnt[0] = p ^ 1
        # local minimization: drop literals implied by other learnt literals
        if len(learnt) > 2:
            keep = [learnt[0]]
            for q in learnt[1:]:
                r = reason[q >> 1]
                if r is None or any((x >> 1) not in seen and level[x >> 1] > 0 for x in r if (x >> 1) != (q >> 1)):
                    keep.append(q)
            learnt = keep
        self.var_inc /= self.var_decay
        if len(learnt) == 1:
            return learnt, 0
        best = 1
        for k in range(2, len(learnt)):
            if level[learnt[k] >> 1] > level[learnt[best] >> 1]:
                best = k
        learnt[1], learnt[best] = learnt[best], learnt[1]
        return learnt, level[learnt[1] >> 1]

    def _analyze_final(self, confl, extra=None):
        """Assumption literals responsible for ``confl`` (internal literals)."""
        level = self.level
        seen = set()
        for q in confl:
            if level[q >> 1] > 0:
                seen.add(q >> 1)
        core = []
        if extra is not None:
            core.append(extra)
        if not self.trail_lim:
            return core
        start = self.trail_lim[0]
        for idx in range(len(self.trail) - 1, start - 1, -1):
            lit = self.trail[idx]
            v = lit >> 1
            if v not in seen:
                continue
            r = self.reason[v]
            if r is None:
                core.append(lit)
            else:
                for q in r:
                    if (q >> 1) != v and level[q >> 1] > 0:
                        seen.add(q >> 1)
        return core

    def _pick_branch(self):
        heap = self.heap
        val = self.val
        activity = self.activity
        in_heap = self.in_heap
        while heap:
            neg_act, v = heapq.heappop(heap)
            if -neg_act != activity[v]:
                continue
            in_heap[v] = False
            if val[2 * v] == 0:
                return 2 * v + self.phase[v]
        return -1

    def _reduce_db(self):
        locked = set()
        for lit in self.trail:
            r = self.reason[lit >> 1]
            if r is not None:
                locked.add(id(r))
        ranked = sorted(self.learnts, key=lambda c: self.lbd.get(id(c), 99))
        drop = {id(c) for c in ranked[len(ranked) // 2:] if id(c) not in locked and self.lbd.get(id(c), 99) > 2}
        if not drop:
            return
        self.learnts = [c for c in self.learnts if id(c) not in drop]
        for c_id in drop:
            self.lbd.pop(c_id, None)
        for lit in range(2, 2 * self.num_vars + 2):
            ws = self.watches[lit]
            if ws:
                self.watches[lit] = [c for c in ws if id(c) not in drop]

    # -- public ------------------------------------------------------------------

    def solve(self, assumptions=(), deadline: float | None = None, cancel: CancelToken | None = None) -> SatOutcome:
        """Solve under ``assumptions`` (DIMACS literals).

        ``deadline`` is a ``time.monotonic()`` value; budget and cancellation
        are checked on entry and at every restart.
        """
        self.solves += 1
        if not self.ok:
            return SatOutcome(UNSAT, core=[])
        self._cancel_until(0)
        if self._propagate() is not None:
            self.ok = False
            return SatOutcome(UNSAT, core=[])
        assume = []
        for lit in assumptions:
            v = abs(lit)
            if v > self.num_vars:
                self.ensure_vars(v)
            assume.append(2 * v + (lit < 0))
        def expired():
            return cancel is not None and cancel.cancelled or deadline is not None and time.monotonic() > deadline

        if expired():
            return SatOutcome(INTERRUPTED)
        restart = 0
        while True:
            budget = _luby(restart) * self.restart_base
            restart += 1
            status, payload = self._search(assume, budget)
            if status is not None:
                break
            if expired():
                self._cancel_until(0)
                return SatOutcome(INTERRUPTED)
        if status == SAT:
            model = [False] * (self.num_vars + 1)
            val = self.val
            for v in range(1, self.num_vars + 1):
                model[v] = val[2 * v] == 1
            self._cancel_until(0)
            return SatOutcome(SAT, model=model)
        core = [(l >> 1) * (-1 if l & 1 else 1) for l in payload]
        self._cancel_until(0)
        return SatOutcome(UNSAT, core=core)

    def _assume(self, assume):
        """Open the assumption level.  Returns a core or None.

        Assumptions are all assigned first and propagated in one pass; only
        root-level facts or a contradictory pair can make one false on entry.
        """
        self.trail_lim.append(len(self.trail))
        val = self.val
        for a in assume:
            value = val[a]
            if value == 1:
                continue
            if value == -1:
                if self.level[a >> 1] == 0:
                    return [a]
                return [a ^ 1, a]  # contradictory assumptions
            self._assign(a, None)
        confl = self._propagate()
        if confl is not None:
            return self._analyze_final(confl)
        return None

    def _search(self, assume, budget):
        """Run until ``budget`` conflicts.  Returns (status or None, core)."""
        alevel = 1 if assume else 0
        conflicts_here = 0
        if alevel and not self.trail_lim:
            core = self._assume(assume)
            if core is not None:
                return UNSAT, core
        while True:
            confl = self._propagate()
            if confl is not None:
                self.conflicts += 1
                conflicts_here += 1
                dl = len(self.trail_lim)
                if dl == 0:
                    self.ok = False
                    return UNSAT, []
                if dl <= alevel:
                    return UNSAT, self._analyze_final(confl)
                learnt, back = self._analyze(confl)
                if back < alevel:
                    self._cancel_until(0)
                    if len(learnt) == 1:
                        self._assign(learnt[0], None)
                    else:
                        self._learn(learnt)
                    if self._propagate() is not None:
                        self.ok = False
                        return UNSAT, []
                    if alevel:
                        core = self._assume(assume)
                        if core is not None:
                            return UNSAT, core
                    continue
                self._cancel_until(back)
                if len(learnt) == 1:
                    self._assign(learnt[0], None)
                else:
                    self._learn(learnt)
                continue
            if conflicts_here >= budget:
                self._cancel_until(alevel)
                return None, None
            if len(self.learnts) >= self.max_learnts:
                self._reduce_db()
                self.max_learnts = int(self.max_learnts * 1.1)
            lit = self._pick_branch()
            if lit < 0:
                return SAT, None
            self.decisions += 1
            self.trail_lim.append(len(self.trail))
            self._assign(lit, None)

    def _learn(self, learnt):
        level = self.level
        self.lbd[id(learnt)] = len({level[q >> 1] for q in learnt})
        self._attach(learnt)
        if len(learnt) > 2:
            self.learnts.append(learnt)
        else:
            self.clauses.append(learnt)
        self._assign(learnt[0], learnt)

    @property
    def stats(self) -> dict:
        return {
            "solves": self.solves,
            "conflicts": self.conflicts,
            "decisions": self.decisions,
            "propagations": self.propagations,
            "learnts": len(self.learnts),
        }


# -- DIMACS ----------------------------------------------------------------------


def parse_dimacs(text: str) -> tuple:
    """Returns ``(num_vars, clauses)``."""
    num_vars, clauses, current = 0, [], []
    for raw in text.splitlines():
        line = raw.strip()
        if not line or line[0] in "c%":
            continue
        if line.startswith("p"):
            parts = line.split()
            if len(parts) != 4 or parts[1] != "cnf":
                raise ValueError(f"bad header {line!r}")
            num_vars = int(parts[2])
            continue
        for tok in line.split():
            lit = int(tok)
            if lit == 0:
                clauses.append(current)
                current = []
            else:
                current.append(lit)
    if current:
        clauses.append(current)
    return num_vars, clauses


def solve_dimacs(text: str, deadline: float | None = None) -> str:
    """Standalone mode: ``s`` status line plus ``v`` model line."""
    num_vars, clauses = parse_dimacs(text)
    solver = Solver(num_vars)
    for c in clauses:
        solver.add_clause(c)
    out = solver.solve(deadline=deadline)
    if out.status == SAT:
        lits = [v if out.model[v] else -v for v in range(1, num_vars + 1)]
        return "s SATISFIABLE\nv " + " ".join(map(str, lits)) + " 0\n"
    if out.status == UNSAT:
        return "s UNSATISFIABLE\n"
    return "s UNKNOWN\n"
