"""Equivalent-literal substitution and backward subsumption, run to fixpoint."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

from .cnf import Clause, CnfFormula, Model, XorConstraint, make_clause, reduce_xor, var


class SubstitutionMap(dict):
    """variable -> representative literal; unbound variables map to themselves."""

    def rep(self, lit: int) -> int:
        r = self.get(lit if lit > 0 else -lit)
        if r is None:
            return lit
        return r if lit > 0 else -r

    def compose(self, later: "SubstitutionMap") -> "SubstitutionMap":
        """Apply ``self`` first, then ``later``."""
        out = SubstitutionMap({v: later.rep(r) for v, r in self.items()})
        for v, r in later.items():
            out.setdefault(v, r)
        return out

    def extend_model(self, model: Model) -> Model:
        out = dict(model)
        for v, r in self.items():
            b = model[var(r)]
            out[v] = b if r > 0 else not b
        return out


@dataclass
class SimplifyOutcome:
    formula: CnfFormula
    substitution: SubstitutionMap = field(default_factory=SubstitutionMap)
    status: str = "simplified"  # or "proven_unsat"
    clauses_subsumed: int = 0
    literals_merged: int = 0
    rounds: int = 0


def _implication_edges(formula: CnfFormula) -> dict[int, list[int]]:
    succ: dict[int, list[int]] = {}

    def edge(a, b):
        succ.setdefault(a, []).append(b)

    for c in formula.clauses:
        if len(c) == 2:
            a, b = c
            edge(-a, b)
            edge(-b, a)
    for x in formula.xors:
        if x.arity == 2:
            a, b = x.variables
            # parity 0: a <-> b; parity 1: a <-> -b
            if x.parity:
                b = -b
            edge(a, b), edge(b, a), edge(-a, -b), edge(-b, -a)
    return succ


def _sccs(succ: dict[int, list[int]]) -> list[list[int]]:
    """Tarjan's algorithm, iterative."""
    index: dict[int, int] = {}
    low: dict[int, int] = {}
    on_stack: set[int] = set()
    stack: list[int] = []
    out: list[list[int]] = []
    counter = 0
    for root in sorted(succ, key=lambda l: (abs(l), l < 0)):
        if root in index:
            continue
        work = [(root, 0)]
        while work:
            node, i = work.pop()
            if i == 0:
                index[node] = low[node] = counter
                counter += 1
                stack.append(node)
                on_stack.add(node)
            nbrs = succ.get(node, ())
            recursed = False
            while i < len(nbrs):
                w = nbrs[i]
                i += 1
                if w not in index:
                    work.append((node, i))
                    work.append((w, 0))
                    recursed = True
                    break
                if w in on_stack:
                    low[node] = min(low[node], index[w])
            if recursed:
                continue
            if low[node] == index[node]:
                comp = []
                while True:
                    w = stack.pop()
                    on_stack.discard(w)
                    comp.append(w)
                    if w == node:
                        break
                out.append(comp)
            if work:
                parent = work[-1][0]
                low[parent] = min(low[parent], low[node])
    return out


def find_equivalent_literals(formula: CnfFormula) -> Optional[SubstitutionMap]:
    """Equivalence classes from the binary implication graph; None on contradiction."""
    subst = SubstitutionMap()
    for comp in _sccs(_implication_edges(formula)):
        if len(comp) < 2:
            continue
        members = set(comp)
        if any(-l in members for l in members):
            return None
        rep = min(comp, key=abs)
        # map through the component holding the representative as a positive literal
        if rep < 0:
            continue
        for l in comp:
            if l != rep:
                subst[abs(l)] = rep if l > 0 else -rep
    return subst


def apply_substitution(formula: CnfFormula, subst: SubstitutionMap) -> CnfFormula:
    out = CnfFormula(formula.num_vars)
    seen: set[Clause] = set()

    def add(c):
        if c is not None and c not in seen:
            seen.add(c)
            out.clauses.append(c)

    for c in formula.clauses:
        add(make_clause(subst.rep(l) for l in c))
    xseen: set[XorConstraint] = set()
    for x in formula.xors:
        parity = x.parity
        vs = []
        for v in x.variables:
            r = subst.rep(v)
            if r < 0:
                parity ^= 1
            vs.append(var(r))
        red = reduce_xor(vs, parity)
        if isinstance(red, XorConstraint):
            if red not in xseen:
                xseen.add(red)
                out.xors.append(red)
        elif red is not None:
            add(red)
    return out


def backward_subsume(formula: CnfFormula) -> CnfFormula:
    clauses = list(dict.fromkeys(formula.clauses))
    occ: dict[int, list[int]] = {}
    for i, c in enumerate(clauses):
        for l in c:
            occ.setdefault(l, []).append(i)
    removed = [False] * len(clauses)
    order = sorted(range(len(clauses)), key=lambda i: (len(clauses[i]), clauses[i]))
    for i in order:
        if removed[i]:
            continue
        c = clauses[i]
        if not c:
            # the empty clause subsumes everything
            for j in range(len(clauses)):
                removed[j] = j != i
            break
        best = min(c, key=lambda l: len(occ[l]))
        cs = set(c)
        for j in occ[best]:
            if j != i and not removed[j] and len(clauses[j]) > len(c) and cs.issubset(clauses[j]):
                removed[j] = True
    return CnfFormula(
        formula.num_vars,
        [c for i, c in enumerate(clauses) if not removed[i]],
        list(formula.xors),
    )


def simplify(formula: CnfFormula, max_rounds: int = 100) -> SimplifyOutcome:
    total = SubstitutionMap()
    f = formula
    subsumed = 0
    rounds = 0
    while rounds < max_rounds:
        rounds += 1
        m = find_equivalent_literals(f)
        if m is None:
            f = CnfFormula(f.num_vars, [()])
            return SimplifyOutcome(f, total, "proven_unsat", subsumed, len(total), rounds)
        if m:
            f = apply_substitution(f, m)
            total = total.compose(m)
        before = len(f.clauses)
        f = backward_subsume(f)
        subsumed += before - len(f.clauses)
        if f.has_empty_clause():
            return SimplifyOutcome(f, total, "proven_unsat", subsumed, len(total), rounds)
        if not m and before == len(f.clauses):
            break
    return SimplifyOutcome(f, total, "simplified", subsumed, len(total), rounds)
