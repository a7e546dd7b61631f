"""A CDCL SAT solver: two-watched-literal propagation, VSIDS decisions,
first-UIP clause learning, phase saving and Luby restarts.

Literals are nonzero ints (+v / -v). The solver is single-shot: build the
clause set, call solve(), read the model. The SMT layer constructs a fresh
instance per check-sat, which keeps the core simple and every query sound.
"""

from __future__ import annotations

import heapq
from typing import Iterable, Optional

UNASSIGNED = -1


def luby(x: int) -> int:
    """The x-th element (0-based) of the Luby restart sequence 1,1,2,1,1,2,4,..."""
    size, seq = 1, 0
    while size < x + 1:
        seq += 1
        size = 2 * size + 1
    while size - 1 != x:
        size = (size - 1) >> 1
        seq -= 1
        x = x % size
    return 1 << seq


class SatSolver:
    def __init__(self):
        self.nvars = 0
        self.value: list[int] = [UNASSIGNED]  # var -> 0/1/UNASSIGNED, 1-based
        self.level: list[int] = [0]
        self.reason: list[Optional[list[int]]] = [None]
        self.phase: list[int] = [0]
        self.activity: list[float] = [0.0]
        self.watches: dict[int, list[list[int]]] = {}
        self.trail: list[int] = []
        self.trail_lim: list[int] = []
        self.prop_head = 0
        self.heap: list[tuple[float, int]] = []
        self.var_inc = 1.0
        self.ok = True
        self._model: list[int] = []

    # -- variables and clauses ------------------------------------------------

    def new_var(self) -> int:
        self.nvars += 1
        self.value.append(UNASSIGNED)
        self.level.append(0)
        self.reason.append(None)
        self.phase.append(0)
        self.activity.append(0.0)
        v = self.nvars
        self.watches[v] = []
        self.watches[-v] = []
        heapq.heappush(self.heap, (0.0, v))
        return v

    def lit_value(self, lit: int) -> int:
        v = self.value[abs(lit)]
        if v == UNASSIGNED:
            return UNASSIGNED
        return v if lit > 0 else 1 - v

    def add_clause(self, lits: Iterable[int]) -> bool:
        """Add a clause; returns False if the formula is already unsat."""
        if not self.ok:
            return False
        seen: set[int] = set()
        clause: list[int] = []
        for lit in lits:
            if -lit in seen:
                return True  # tautology
            if lit in seen:
                continue
            val = self.lit_value(lit)
            if val == 1 and self.level[abs(lit)] == 0:
                return True  # satisfied at root
            if val == 0 and self.level[abs(lit)] == 0:
                continue  # falsified at root: drop literal
            seen.add(lit)
            clause.append(lit)
        if not clause:
            self.ok = False
            return False
        if len(clause) == 1:
            if not self.enqueue(clause[0], None):
                self.ok = False
                return False
            conflict = self.propagate()
            if conflict is not None:
                self.ok = False
                return False
            return True
        self.attach(clause)
        return True

    def attach(self, clause: list[int]) -> None:
        self.watches[-clause[0]].append(clause)
        self.watches[-clause[1]].append(clause)

    # -- assignment trail ------------------------------------------------------

    def decision_level(self) -> int:
        return len(self.trail_lim)

    def enqueue(self, lit: int, reason: Optional[list[int]]) -> bool:
        val = self.lit_value(lit)
        if val != UNASSIGNED:
            return val == 1
        v = abs(lit)
        self.value[v] = 1 if lit > 0 else 0
        self.level[v] = self.decision_level()
        self.reason[v] = reason
        self.trail.append(lit)
        return True

    def propagate(self) -> Optional[list[int]]:
        """Unit propagation; returns a conflicting clause or None."""
        while self.prop_head < len(self.trail):
            p = self.trail[self.prop_head]
            self.prop_head += 1
            watchers = self.watches[p]
            self.watches[p] = []
            for idx, clause in enumerate(watchers):
                # the watched literal that became false is -p
                if clause[0] == -p:
                    clause[0], clause[1] = clause[1], clause[0]
                if self.lit_value(clause[0]) == 1:
                    self.watches[p].append(clause)
                    continue
                moved = False
                for k in range(2, len(clause)):
                    if self.lit_value(clause[k]) != 0:
                        clause[1], clause[k] = clause[k], clause[1]
                        self.watches[-clause[1]].append(clause)
                        moved = True
                        break
                if moved:
                    continue
                self.watches[p].append(clause)
                if not self.enqueue(clause[0], clause):
                    self.watches[p].extend(watchers[idx + 1 :])
                    return clause
        return None

    def cancel_until(self, target: int) -> None:
        if self.decision_level() <= target:
            return
        bound = self.trail_lim[target]
        for lit in reversed(self.trail[bound:]):
            v = abs(lit)
            self.phase[v] = self.value[v]
            self.value[v] = UNASSIGNED
            self.reason[v] = None
            heapq.heappush(self.heap, (-self.activity[v], v))
        del self.trail[bound:]
        del self.trail_lim[target:]
        self.prop_head = len(self.trail)

    # -- VSIDS -----------------------------------------------------------------

    def bump(self, v: int) -> None:
        self.activity[v] += self.var_inc
        if self.activity[v] > 1e100:
            for u in range(1, self.nvars + 1):
                self.activity[u] *= 1e-100
            self.var_inc *= 1e-100
        heapq.heappush(self.heap, (-self.activity[v], v))

    def decay(self) -> None:
        self.var_inc /= 0.95

    def pick_branch_var(self) -> int:
        while self.heap:
            act, v = heapq.heappop(self.heap)
            if self.value[v] == UNASSIGNED and -act == self.activity[v]:
                return v
        for v in range(1, self.nvars + 1):
            if self.value[v] == UNASSIGNED:
                return v
        return 0

    # -- conflict analysis -----------------------------------------------------

    def analyze(self, conflict: list[int]) -> tuple[list[int], int]:
        """First-UIP learned clause and the level to backtrack to."""
        learnt: list[int] = [0]  # slot 0 for the asserting literal
        seen = [False] * (self.nvars + 1)
        counter = 0
        p: Optional[int] = None
        reason: list[int] = conflict
        index = len(self.trail) - 1
        while True:
            for q in reason:
                if p is not None and q == p:
                    continue
                v = abs(q)
                if not seen[v] and self.level[v] > 0:
                    seen[v] = True
                    self.bump(v)
                    if self.level[v] >= self.decision_level():
                        counter += 1
                    else:
                        learnt.append(q)
            while not seen[abs(self.trail[index])]:
                index -= 1
            p = self.trail[index]
            v = abs(p)
            seen[v] = False
            counter -= 1
            if counter == 0:
                learnt[0] = -p
                break
            reason = self.reason[v] or []
            index -= 1
        if len(learnt) == 1:
            return learnt, 0
        back = max(self.level[abs(q)] for q in learnt[1:])
        hi = max(range(1, len(learnt)), key=lambda i: self.level[abs(learnt[i])])
        learnt[1], learnt[hi] = learnt[hi], learnt[1]
        return learnt, back

    # -- main loop ---------------------------------------------------------------

    def solve(self, conflict_budget: Optional[int] = None) -> Optional[bool]:
        """True = sat, False = unsat, None = budget exhausted."""
        if not self.ok:
            return False
        if self.propagate() is not None:
            self.ok = False
            return False
        conflicts_total = 0
        restart_n = 0
        while True:
            restart_limit = 100 * luby(restart_n)
            restart_n += 1
            conflicts = 0
            while True:
                conflict = self.propagate()
                if conflict is not None:
                    conflicts += 1
                    conflicts_total += 1
                    if conflict_budget is not None and conflicts_total > conflict_budget:
                        self.cancel_until(0)
                        return None
                    if self.decision_level() == 0:
                        self.ok = False
                        return False
                    learnt, back = self.analyze(conflict)
                    self.cancel_until(back)
                    if len(learnt) == 1:
                        self.enqueue(learnt[0], None)
                    else:
                        self.attach(learnt)
                        self.enqueue(learnt[0], learnt)
                    self.decay()
                    continue
                if conflicts >= restart_limit:
                    self.cancel_until(0)
                    break
                v = self.pick_branch_var()
                if v == 0:
                    self._model = list(self.value)
                    self.cancel_until(0)
                    return True
                self.trail_lim.append(len(self.trail))
                self.enqueue(v if self.phase[v] == 1 else -v, None)

    def model_value(self, v: int) -> bool:
        return self._model[v] == 1
