"""Conflict-driven clause learning backend.

Internally a literal is an integer code ``2*v + neg``; its negation is
``code ^ 1``.  Clauses are Python lists whose first two positions are the
watched literals, and a reason clause always carries the implied literal in
position 0.
"""

from __future__ import annotations

import heapq
import random
import time
from dataclasses import dataclass, field
from typing import Iterable, Optional, Sequence

from .cnf import Model


class BudgetExhausted(Exception):
    pass


@dataclass
class CdclStats:
    conflicts: int = 0
    decisions: int = 0
    propagations: int = 0
    learned: int = 0
    restarts: int = 0
    reductions: int = 0

    def merge(self, other: "CdclStats") -> None:
        for k in self.__dataclass_fields__:
            setattr(self, k, getattr(self, k) + getattr(other, k))

    def as_dict(self) -> dict:
        return {k: getattr(self, k) for k in self.__dataclass_fields__}


@dataclass
class CdclResult:
    status: str  # "SAT", "UNSAT" or "UNKNOWN"
    model: Optional[Model] = None
    stats: CdclStats = field(default_factory=CdclStats)


def luby(i: int) -> int:
    """i-th element (1-based) of the Luby sequence 1 1 2 1 1 2 4 ..."""
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


def _code(lit: int) -> int:
    return (lit << 1) if lit > 0 else ((-lit) << 1) | 1


def _lit(code: int) -> int:
    return -(code >> 1) if code & 1 else code >> 1


class Solver:
    var_decay = 0.95
    clause_decay = 0.999
    restart_unit = 64
    first_reduce = 2000
    reduce_increment = 300
    keep_lbd = 3

    def __init__(self, num_vars: int, seed: int = 0, debug: bool = False):
        self.n = num_vars
        size = 2 * (num_vars + 1)
        self.val = [0] * size  # per literal code: 1 true, -1 false, 0 free
        self.level = [0] * (num_vars + 1)
        self.reason: list = [None] * (num_vars + 1)
        self.watches: list[list[list[int]]] = [[] for _ in range(size)]
        self.trail: list[int] = []
        self.trail_lim: list[int] = []
        self.qhead = 0
        self.clauses: list[list[int]] = []
        self.learnts: list[list[int]] = []
        self.lbd: dict[int, int] = {}
        self.cla_act: dict[int, float] = {}
        self.cla_inc = 1.0
        rng = random.Random(seed)
        self.activity = [0.0] + [rng.random() * 1e-6 for _ in range(num_vars)]
        self.var_inc = 1.0
        self.phase = [False] * (num_vars + 1)
        self.heap: list[tuple[float, int]] = []
        self._rebuild_heap()
        self.seen = [False] * (num_vars + 1)
        self.ok = True
        self.stats = CdclStats()
        self.debug = debug
        self.learned_log: list[list[int]] = []

    # -- clause database -------------------------------------------------

    def add_clause(self, lits: Iterable[int]) -> bool:
        """Add a DIMACS clause at level 0; returns False once unsatisfiable."""
        if not self.ok:
            return False
        codes = []
        for l in sorted(set(lits), key=abs):
            if abs(l) > self.n:
                raise ValueError(f"literal {l} out of range")
            c = _code(l)
            if c ^ 1 in codes:
                return True
            if self.val[c] == 1:
                return True
            if self.val[c] == 0:
                codes.append(c)
        if not codes:
            self.ok = False
        elif len(codes) == 1:
            self._enqueue(codes[0], None)
            self.ok = self._propagate() is None
        else:
            self.clauses.append(codes)
            self._watch(codes)
        return self.ok

    def _watch(self, c: list[int]) -> None:
        self.watches[c[0]].append(c)
        self.watches[c[1]].append(c)

    def _locked(self, c: list[int]) -> bool:
        return self.val[c[0]] == 1 and self.reason[c[0] >> 1] is c

    def _reduce_db(self) -> None:
        self.stats.reductions += 1
        keep, cand = [], []
        for c in self.learnts:
            if self.lbd[id(c)] <= self.keep_lbd or self._locked(c):
                keep.append(c)
            else:
                cand.append(c)
        cand.sort(key=lambda c: (self.lbd[id(c)], -self.cla_act[id(c)]))
        half = len(cand) // 2
        keep.extend(cand[:half])
        dead = {id(c) for c in cand[half:]}
        if not dead:
            return
        for c in cand[half:]:
            del self.lbd[id(c)]
            del self.cla_act[id(c)]
        self.learnts = keep
        for i, ws in enumerate(self.watches):
            if ws:
                self.watches[i] = [c for c in ws if id(c) not in dead]

    # -- assignment ------------------------------------------------------

    def _enqueue(self, code: int, reason) -> None:
        self.val[code] = 1
        self.val[code ^ 1] = -1
        v = code >> 1
        self.level[v] = len(self.trail_lim)
        self.reason[v] = reason
        self.trail.append(code)

    def _cancel_until(self, lvl: int) -> None:
        if len(self.trail_lim) <= lvl:
            return
        start = self.trail_lim[lvl]
        val, phase, act, heap = self.val, self.phase, self.activity, self.heap
        for code in self.trail[start:]:
            v = code >> 1
            val[code] = 0
            val[code ^ 1] = 0
            phase[v] = not (code & 1)
            self.reason[v] = None
            heapq.heappush(heap, (-act[v], v))
        del self.trail[start:]
        del self.trail_lim[lvl:]
        self.qhead = start
        if len(heap) > 4 * self.n + 64:
            self._rebuild_heap()

    def _rebuild_heap(self) -> None:
        val, act = self.val, self.activity
        self.heap = [(-act[v], v) for v in range(1, self.n + 1) if val[v << 1] == 0]
        heapq.heapify(self.heap)

    def _propagate(self) -> Optional[list[int]]:
        val, watches, trail = self.val, self.watches, self.trail
        level, reason = self.level, self.reason
        lvl = len(self.trail_lim)
        qhead = self.qhead
        props = 0
        confl = None
        while qhead < len(trail):
            fl = trail[qhead] ^ 1
            qhead += 1
            props += 1
            ws = watches[fl]
            kept = []
            for i, c in enumerate(ws):
                if c[0] == fl:
                    c[0] = c[1]
                    c[1] = fl
                first = c[0]
                if val[first] == 1:
                    kept.append(c)
                    continue
                for k in range(2, len(c)):
                    lk = c[k]
                    if val[lk] != -1:
                        c[1] = lk
                        c[k] = fl
                        watches[lk].append(c)
                        break
                else:
                    kept.append(c)
                    if val[first] == -1:
                        kept.extend(ws[i + 1:])
                        confl = c
                        break
                    val[first] = 1
                    val[first ^ 1] = -1
                    v = first >> 1
                    level[v] = lvl
                    reason[v] = c
                    trail.append(first)
            watches[fl] = kept
            if confl is not None:
                qhead = len(trail)
                break
        self.qhead = qhead
        self.stats.propagations += props
        return confl

    # -- conflict analysis -----------------------------------------------

    def _bump_var(self, v: int) -> None:
        act = self.activity
        act[v] += self.var_inc
        if act[v] > 1e100:
            for i in range(1, self.n + 1):
                act[i] *= 1e-100
            self.var_inc *= 1e-100
            self._rebuild_heap()
        elif self.val[v << 1] == 0:
            heapq.heappush(self.heap, (-act[v], v))

    def _bump_clause(self, c: list[int]) -> None:
        k = id(c)
        if k in self.cla_act:
            self.cla_act[k] += self.cla_inc
            if self.cla_act[k] > 1e20:
                for key in self.cla_act:
                    self.cla_act[key] *= 1e-20
                self.cla_inc *= 1e-20

    def analyze(self, confl: list[int]) -> tuple[list[int], int]:
        """First-UIP learning; returns (learned codes with the UIP first, backjump level)."""
        seen, level, reason, trail = self.seen, self.level, self.reason, self.trail
        cur = len(self.trail_lim)
        learnt = [0]
        path = 0
        p = -1
        idx = len(trail) - 1
        c = confl
        while True:
            self._bump_clause(c)
            for q in (c if p < 0 else c[1:]):
                v = q >> 1
                if not seen[v] and level[v] > 0:
                    seen[v] = True
                    self._bump_var(v)
                    if level[v] >= cur:
                        path += 1
                    else:
                        learnt.append(q)
            while not seen[trail[idx] >> 1]:
                idx -= 1
            p = trail[idx]
            idx -= 1
            c = reason[p >> 1]
            seen[p >> 1] = False
            path -= 1
            if path == 0:
                break
        learnt[0] = p ^ 1

        # recursive minimization: drop literals implied by the rest
        to_clear = list(learnt[1:])
        levels = 0
        for q in learnt[1:]:
            levels |= 1 << (level[q >> 1] & 63)
        out = [learnt[0]]
        for q in learnt[1:]:
            if reason[q >> 1] is None or not self._redundant(q, levels, to_clear):
                out.append(q)
        for q in to_clear:
            seen[q >> 1] = False

        bt = 0
        if len(out) > 1:
            best = 1
            for i in range(2, len(out)):
                if level[out[i] >> 1] > level[out[best] >> 1]:
                    best = i
            out[1], out[best] = out[best], out[1]
            bt = level[out[1] >> 1]
        return out, bt

    def _redundant(self, q: int, levels: int, to_clear: list[int]) -> bool:
        seen, level, reason = self.seen, self.level, self.reason
        stack = [q]
        top = len(to_clear)
        while stack:
            c = reason[stack.pop() >> 1]
            for r in c[1:]:
                v = r >> 1
                if seen[v] or level[v] == 0:
                    continue
                if reason[v] is not None and (levels >> (level[v] & 63)) & 1:
                    seen[v] = True
                    stack.append(r)
                    to_clear.append(r)
                else:
                    for u in to_clear[top:]:
                        seen[u >> 1] = False
                    del to_clear[top:]
                    return False
        return True

    # -- search ----------------------------------------------------------

    def _pick_branch(self) -> int:
        heap, val, act = self.heap, self.val, self.activity
        while heap:
            a, v = heapq.heappop(heap)
            if val[v << 1] == 0 and -a == act[v]:
                return (v << 1) | (0 if self.phase[v] else 1)
        for v in range(1, self.n + 1):
            if val[v << 1] == 0:
                return (v << 1) | (0 if self.phase[v] else 1)
        return -1

    def _check_watches(self) -> None:
        val = self.val
        for c in self.clauses + self.learnts:
            assert c in self.watches[c[0]] and c in self.watches[c[1]], "clause not watched"
            for a, b in ((c[0], c[1]), (c[1], c[0])):
                if val[a] == -1:
                    # a false watch needs a true partner assigned no later
                    assert val[b] == 1, f"false watch without a true partner: {c}"
                    assert self.level[b >> 1] <= self.level[a >> 1]

    def solve(
        self,
        max_conflicts: Optional[int] = None,
        deadline: Optional[float] = None,
    ) -> CdclResult:
        if not self.ok:
            return CdclResult("UNSAT", stats=self.stats)
        if self._propagate() is not None:
            self.ok = False
            return CdclResult("UNSAT", stats=self.stats)
        restart_i = 1
        restart_budget = luby(restart_i) * self.restart_unit
        since_restart = 0
        next_reduce = self.first_reduce
        reduce_step = self.first_reduce
        st = self.stats
        while True:
            confl = self._propagate()
            if confl is not None:
                st.conflicts += 1
                since_restart += 1
                if not self.trail_lim:
                    self.ok = False
                    return CdclResult("UNSAT", stats=st)
                learnt, bt = self.analyze(confl)
                if self.debug:
                    self._assert_asserting(learnt, bt)
                    self.learned_log.append([_lit(c) for c in learnt])
                self._cancel_until(bt)
                if len(learnt) == 1:
                    self._enqueue(learnt[0], None)
                else:
                    levels = {self.level[c >> 1] for c in learnt}
                    self.lbd[id(learnt)] = len(levels)
                    self.cla_act[id(learnt)] = self.cla_inc
                    self.learnts.append(learnt)
                    self._watch(learnt)
                    self._enqueue(learnt[0], learnt)
                st.learned += 1
                self.var_inc /= self.var_decay
                self.cla_inc /= self.clause_decay
                if max_conflicts is not None and st.conflicts >= max_conflicts:
                    self._cancel_until(0)
                    return CdclResult("UNKNOWN", stats=st)
                if deadline is not None and (st.conflicts & 63) == 0 and time.monotonic() > deadline:
                    self._cancel_until(0)
                    return CdclResult("UNKNOWN", stats=st)
                continue
            if self.debug:
                self._check_watches()
            if since_restart >= restart_budget:
                st.restarts += 1
                restart_i += 1
                restart_budget = luby(restart_i) * self.restart_unit
                since_restart = 0
                self._cancel_until(0)
                continue
            if st.conflicts >= next_reduce:
                reduce_step += self.reduce_increment
                next_reduce = st.conflicts + reduce_step
                self._reduce_db()
            code = self._pick_branch()
            if code < 0:
                model = {v: self.val[v << 1] == 1 for v in range(1, self.n + 1)}
                self._cancel_until(0)
                return CdclResult("SAT", model, st)
            st.decisions += 1
            self.trail_lim.append(len(self.trail))
            self._enqueue(code, None)

    def decide(self, lit: int) -> Optional[list[int]]:
        """Open a new decision level with ``lit`` and propagate.

        Returns the conflicting clause as DIMACS literals, or None.
        """
        code = _code(lit)
        if self.val[code] != 0:
            raise ValueError(f"literal {lit} is already assigned")
        self.trail_lim.append(len(self.trail))
        self._enqueue(code, None)
        confl = self._propagate()
        return None if confl is None else [_lit(c) for c in confl]

    def _assert_asserting(self, learnt: list[int], bt: int) -> None:
        cur = len(self.trail_lim)
        assert all(self.val[c] == -1 for c in learnt), "learned clause not falsified"
        at_cur = [c for c in learnt if self.level[c >> 1] == cur]
        assert at_cur == [learnt[0]], "learned clause is not first-UIP"
        assert all(self.level[c >> 1] <= bt for c in learnt[1:])
        assert bt < cur


def analyze_conflict(solver: Solver, conflict: Sequence[int]) -> tuple[list[int], int]:
    """DIMACS-literal wrapper around :meth:`Solver.analyze`.

    ``conflict`` must be a clause currently attached to the solver and
    falsified at a decision level >= 1.
    """
    if not solver.trail_lim:
        raise ValueError("conflict at level 0: the formula is unsatisfiable")
    codes = [_code(l) for l in conflict]
    if any(solver.val[c] != -1 for c in codes):
        raise ValueError("clause is not falsified by the current assignment")
    learnt, bt = solver.analyze(codes)
    return [_lit(c) for c in learnt], bt


def cdcl_solve(
    clauses: Iterable[Sequence[int]],
    num_vars: int,
    max_conflicts: Optional[int] = None,
    time_limit: Optional[float] = None,
    seed: int = 0,
    debug: bool = False,
) -> CdclResult:
    s = Solver(num_vars, seed=seed, debug=debug)
    for c in clauses:
        if not s.add_clause(c):
            return CdclResult("UNSAT", stats=s.stats)
    deadline = None if time_limit is None else time.monotonic() + time_limit
    return s.solve(max_conflicts=max_conflicts, deadline=deadline)
