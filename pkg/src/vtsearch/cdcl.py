"""A small conflict-driven clause-learning SAT solver in pure Python.

Two watched literals, first-UIP learning with recursive minimization, VSIDS
decisions with phase saving, Luby restarts, and activity-based reduction of
the learned clause database.  It is adequate for instances up to a few
thousand variables; larger encodings should go to a native backend.
"""
from __future__ import annotations

import heapq
import random
import time


def luby(i: int) -> int:
    """The i-th element (1-based) of the Luby sequence 1 1 2 1 1 2 4 ..."""
    if i < 1:
        raise ValueError("luby index starts at 1")
    k = 1
    while (1 << k) - 1 < i:
        k += 1
    while True:
        if i == (1 << k) - 1:
            return 1 << (k - 1)
        i -= (1 << (k - 1)) - 1
        k = 1
        while (1 << k) - 1 < i:
            k += 1


class CdclSolver:
    """Solve a CNF given as lists of nonzero DIMACS literals.

    Internally literal ``v`` maps to ``2v`` and ``-v`` to ``2v + 1``.
    """

    def __init__(self, num_vars: int, clauses, seed: int = 0):
        self.num_vars = num_vars
        self.rng = random.Random(seed)
        self.random_freq = 0.02 if seed else 0.0
        size = 2 * (num_vars + 1)
        self.value = [0] * size          # per literal: 1 true, -1 false, 0 unassigned
        self.level = [0] * (num_vars + 1)
        self.reason: list = [None] * (num_vars + 1)
        self.watches: list[list[list[int]]] = [[] for _ in range(size)]
        self.trail: list[int] = []
        self.trail_lim: list[int] = []
        self.qhead = 0
        self.activity = [0.0] * (num_vars + 1)
        self.var_inc = 1.0
        self.phase = [False] * (num_vars + 1)
        self.learnts: list[list[int]] = []
        self.cla_act: dict[int, float] = {}
        self.cla_inc = 1.0
        self.conflicts = 0
        self.decisions = 0
        self.ok = True
        order = list(range(1, num_vars + 1))
        if seed:
            self.rng.shuffle(order)
            for v in order:
                self.activity[v] = self.rng.random() * 1e-5
        self.heap = [(-self.activity[v], v) for v in order]
        heapq.heapify(self.heap)
        for cl in clauses:
            self._add_input(cl)

    # literal helpers
    @staticmethod
    def _lit(x: int) -> int:
        return 2 * x if x > 0 else -2 * x + 1

    def _add_input(self, cl):
        if not self.ok:
            return
        lits = set()
        for x in cl:
            lit = self._lit(x)
            if lit ^ 1 in lits:
                return  # tautology
            lits.add(lit)
        lits = [l for l in lits if self.value[l] != -1]
        if any(self.value[l] == 1 for l in lits):
            return
        if not lits:
            self.ok = False
        elif len(lits) == 1:
            self._assign(lits[0], None)
            if self._propagate() is not None:
                self.ok = False
        else:
            self._attach(lits)

    def _attach(self, c: list[int]):
        self.watches[c[0] ^ 1].append(c)
        self.watches[c[1] ^ 1].append(c)

    def _assign(self, lit: int, reason):
        v = lit >> 1
        self.value[lit] = 1
        self.value[lit ^ 1] = -1
        self.level[v] = len(self.trail_lim)
        self.reason[v] = reason
        self.trail.append(lit)

    def _propagate(self):
        value, watches = self.value, self.watches
        while self.qhead < len(self.trail):
            false_lit = self.trail[self.qhead] ^ 1
            self.qhead += 1
            ws = watches[self.trail[self.qhead - 1]]
            # ws holds clauses watching false_lit (indexed by its negation)
            i = j = 0
            n = len(ws)
            while i < n:
                c = ws[i]
                i += 1
                if c[0] == false_lit:
                    c[0], c[1] = c[1], false_lit
                first = c[0]
                if value[first] == 1:
                    ws[j] = c
                    j += 1
                    continue
                for k in range(2, len(c)):
                    if value[c[k]] != -1:
                        c[1], c[k] = c[k], false_lit
                        watches[c[1] ^ 1].append(c)
                        break
                else:
                    ws[j] = c
                    j += 1
                    if value[first] == -1:
                        while i < n:
                            ws[j] = ws[i]
                            j += 1
                            i += 1
                        del ws[j:]
                        self.qhead = len(self.trail)
                        return c
                    self._assign(first, c)
            del ws[j:]
        return None

    def _bump_var(self, v: int):
        self.activity[v] += self.var_inc
        if self.activity[v] > 1e100:
            for u in range(1, self.num_vars + 1):
                self.activity[u] *= 1e-100
            self.var_inc *= 1e-100
            self.heap = [(-self.activity[u], u) for u in range(1, self.num_vars + 1)]
            heapq.heapify(self.heap)
        else:
            heapq.heappush(self.heap, (-self.activity[v], v))

    def _bump_clause(self, c):
        key = id(c)
        if key in self.cla_act:
            self.cla_act[key] += self.cla_inc
            if self.cla_act[key] > 1e20:
                for k in self.cla_act:
                    self.cla_act[k] *= 1e-20
                self.cla_inc *= 1e-20

    def _analyze(self, confl):
        seen = [False] * (self.num_vars + 1)
        learnt = [0]
        counter = 0
        p = None
        idx = len(self.trail) - 1
        cur = len(self.trail_lim)
        while True:
            self._bump_clause(confl)
            for q in (confl if p is None else confl[1:]):
                v = q >> 1
                if not seen[v] and self.level[v] > 0:
                    seen[v] = True
                    self._bump_var(v)
                    if self.level[v] >= cur:
                        counter += 1
                    else:
                        learnt.append(q)
            while not seen[self.trail[idx] >> 1]:
                idx -= 1
            p = self.trail[idx]
            idx -= 1
            v = p >> 1
            confl = self.reason[v]
            seen[v] = False
            counter -= 1
            if counter == 0:
                break
            # reason clauses keep their implied literal first
            if confl[0] != p:
                k = confl.index(p)
                confl[0], confl[k] = confl[k], confl[0]
        learnt[0] = p ^ 1
        learnt = self._minimize(learnt, seen)
        if len(learnt) == 1:
            back = 0
        else:
            best = max(range(1, len(learnt)), key=lambda k: self.level[learnt[k] >> 1])
            learnt[1], learnt[best] = learnt[best], learnt[1]
            back = self.level[learnt[1] >> 1]
        return learnt, back

    def _minimize(self, learnt, seen):
        for q in learnt[1:]:
            seen[q >> 1] = True
        levels = {self.level[q >> 1] for q in learnt[1:]}
        out = [learnt[0]]
        for q in learnt[1:]:
            if self.reason[q >> 1] is None or not self._redundant(q, seen, levels):
                out.append(q)
        return out

    def _redundant(self, lit, seen, levels):
        stack = [lit]
        visited = []
        while stack:
            r = self.reason[stack.pop() >> 1]
            for q in r[1:]:
                v = q >> 1
                if seen[v] or self.level[v] == 0:
                    continue
                if self.reason[v] is None or self.level[v] not in levels:
                    for u in visited:
                        seen[u] = False
                    return False
                seen[v] = True
                visited.append(v)
                stack.append(q)
        return True

    def _backtrack(self, level: int):
        if len(self.trail_lim) <= level:
            return
        stop = self.trail_lim[level]
        for lit in self.trail[stop:]:
            v = lit >> 1
            self.value[lit] = self.value[lit ^ 1] = 0
            self.reason[v] = None
            self.phase[v] = bool(lit & 1) is False
            heapq.heappush(self.heap, (-self.activity[v], v))
        del self.trail[stop:]
        del self.trail_lim[level:]
        self.qhead = len(self.trail)

    def _pick(self):
        if self.random_freq and self.rng.random() < self.random_freq:
            free = [v for v in range(1, self.num_vars + 1) if self.value[2 * v] == 0]
            if free:
                v = self.rng.choice(free)
                return 2 * v if self.phase[v] else 2 * v + 1
        while self.heap:
            _, v = heapq.heappop(self.heap)
            if self.value[2 * v] == 0:
                return 2 * v if self.phase[v] else 2 * v + 1
        return None

    def _reduce_db(self):
        self.learnts.sort(key=lambda c: self.cla_act.get(id(c), 0.0))
        locked = {id(self.reason[l >> 1]) for l in self.trail if self.reason[l >> 1] is not None}
        half = len(self.learnts) // 2
        keep, drop = [], set()
        for k, c in enumerate(self.learnts):
            if k < half and len(c) > 2 and id(c) not in locked:
                drop.add(id(c))
                self.cla_act.pop(id(c), None)
            else:
                keep.append(c)
        self.learnts = keep
        for ws in self.watches:
            ws[:] = [c for c in ws if id(c) not in drop]

    def solve(self, deadline: float | None = None) -> bool | None:
        """True (sat), False (unsat) or None when ``deadline`` passes."""
        if not self.ok:
            return False
        if self._propagate() is not None:
            return False
        restart = 1
        budget = 100 * luby(restart)
        max_learnts = max(1000, self.num_vars // 2)
        while True:
            confl = self._propagate()
            if confl is not None:
                self.conflicts += 1
                if not self.trail_lim:
                    return False
                learnt, back = self._analyze(confl)
                self._backtrack(back)
                if len(learnt) == 1:
                    self._assign(learnt[0], None)
                else:
                    self._attach(learnt)
                    self.learnts.append(learnt)
                    self.cla_act[id(learnt)] = self.cla_inc
                    self._assign(learnt[0], learnt)
                self.var_inc /= 0.95
                self.cla_inc /= 0.999
                budget -= 1
                if deadline is not None and self.conflicts % 64 == 0 and time.monotonic() > deadline:
                    return None
                continue
            if budget <= 0:
                restart += 1
                budget = 100 * luby(restart)
                self._backtrack(0)
                if len(self.learnts) > max_learnts:
                    self._reduce_db()
                    max_learnts = int(max_learnts * 1.1)
                continue
            lit = self._pick()
            if lit is None:
                return True
            self.decisions += 1
            self.trail_lim.append(len(self.trail))
            self._assign(lit, None)

    def model(self) -> list[bool]:
        """Assignment indexed by variable; element 0 is unused."""
        return [False] + [self.value[2 * v] == 1 for v in range(1, self.num_vars + 1)]
