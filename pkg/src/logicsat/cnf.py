"""Literals, clauses, mixed clause/XOR formulas, partial assignments.

Literals are DIMACS-style signed integers: ``v`` is the positive occurrence
of variable ``v`` and ``-v`` the negated one.  Clauses are tuples of literals
kept in canonical order (ascending variable, no duplicates), which lets rule
matching and subsumption use them directly as dictionary keys.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Optional, Union

Clause = tuple[int, ...]
Model = dict[int, bool]


def var(lit: int) -> int:
    return lit if lit > 0 else -lit


def neg(lit: int) -> int:
    return -lit


def sign(lit: int) -> bool:
    """True for a positive occurrence."""
    return lit > 0


def lit_key(lit: int) -> tuple[int, int]:
    """Sort key: by variable, positive before negative."""
    return (lit, 0) if lit > 0 else (-lit, 1)


def make_clause(lits: Iterable[int]) -> Optional[Clause]:
    """Normalize a clause; returns None when it is a tautology."""
    seen = set()
    for lit in lits:
        if lit == 0:
            raise ValueError("0 is not a literal")
        if -lit in seen:
            return None
        seen.add(lit)
    return tuple(sorted(seen, key=lit_key))


def is_tautology(lits: Iterable[int]) -> bool:
    return make_clause(lits) is None


@dataclass(frozen=True, order=True)
class XorConstraint:
    """Parity constraint: the XOR of ``variables`` must equal ``parity``."""

    variables: tuple[int, ...]
    parity: int

    def __post_init__(self):
        vs = self.variables
        if len(vs) < 2:
            raise ValueError("XOR constraints need arity >= 2; use a unit clause")
        if any(a >= b for a, b in zip(vs, vs[1:])) or vs[0] < 1:
            raise ValueError(f"XOR variables must be distinct, sorted, positive: {vs}")
        if self.parity not in (0, 1):
            raise ValueError("parity must be 0 or 1")

    @property
    def arity(self) -> int:
        return len(self.variables)

    def satisfied_by(self, model: Mapping[int, bool]) -> bool:
        p = 0
        for v in self.variables:
            p ^= model[v]
        return p == self.parity


def reduce_xor(variables: Iterable[int], parity: int):
    """Canonicalize an XOR over possibly repeated variables.

    Returns an XorConstraint, a unit clause (arity 1), the empty clause
    (arity 0 with parity 1), or None when the constraint is trivially true.
    """
    odd: set[int] = set()
    for v in variables:
        if v < 1:
            raise ValueError(f"bad XOR variable {v}")
        odd ^= {v}
    vs = tuple(sorted(odd))
    parity &= 1
    if len(vs) >= 2:
        return XorConstraint(vs, parity)
    if len(vs) == 1:
        return (vs[0],) if parity else (-vs[0],)
    return () if parity else None


def xor_from_literals(lits: Iterable[int]):
    """XOR of literals equal to true, normalized to positive variables."""
    parity = 1
    vs = []
    for lit in lits:
        if lit == 0:
            raise ValueError("0 is not a literal")
        if lit < 0:
            parity ^= 1
        vs.append(var(lit))
    return reduce_xor(vs, parity)


@dataclass
class CnfFormula:
    num_vars: int = 0
    clauses: list[Clause] = field(default_factory=list)
    xors: list[XorConstraint] = field(default_factory=list)

    def add_clause(self, lits: Iterable[int]) -> bool:
        """Normalize and append; tautologies are dropped (returns False)."""
        c = make_clause(lits)
        if c is None:
            return False
        if c:
            self.num_vars = max(self.num_vars, var(c[-1]))
        self.clauses.append(c)
        return True

    def add_xor(self, variables: Iterable[int], parity: int) -> None:
        r = reduce_xor(variables, parity)
        if r is None:
            return
        if isinstance(r, XorConstraint):
            self.num_vars = max(self.num_vars, r.variables[-1])
            self.xors.append(r)
        else:
            self.add_clause(r)

    def copy(self) -> "CnfFormula":
        return CnfFormula(self.num_vars, list(self.clauses), list(self.xors))

    def is_empty(self) -> bool:
        return not self.clauses and not self.xors

    def has_empty_clause(self) -> bool:
        return any(not c for c in self.clauses)

    def variables(self) -> set[int]:
        vs = {var(l) for c in self.clauses for l in c}
        for x in self.xors:
            vs.update(x.variables)
        return vs

    def check(self) -> None:
        """Raise ValueError if a constraint mentions a variable above num_vars."""
        for v in self.variables():
            if v > self.num_vars:
                raise ValueError(f"variable {v} exceeds num_vars={self.num_vars}")


class Assignment:
    """Partial assignment with a trail, decision levels and antecedents."""

    def __init__(self, num_vars: int):
        self.num_vars = num_vars
        self.values: list[Optional[bool]] = [None] * (num_vars + 1)
        self.level_of: list[int] = [-1] * (num_vars + 1)
        self.reason_of: list = [None] * (num_vars + 1)
        self.trail: list[int] = []
        self.level = 0

    @classmethod
    def from_literals(cls, num_vars: int, lits: Iterable[int]) -> "Assignment":
        a = cls(num_vars)
        for lit in lits:
            a.assign(lit)
        return a

    def value(self, lit: int) -> Optional[bool]:
        v = self.values[lit if lit > 0 else -lit]
        if v is None:
            return None
        return v if lit > 0 else not v

    def assign(self, lit: int, reason=None) -> None:
        v = var(lit)
        if self.values[v] is not None:
            raise ValueError(f"variable {v} already assigned")
        self.values[v] = lit > 0
        self.level_of[v] = self.level
        self.reason_of[v] = reason
        self.trail.append(lit)

    def decide(self, lit: int) -> None:
        self.level += 1
        self.assign(lit)

    def is_assigned(self, v: int) -> bool:
        return self.values[v] is not None

    def copy(self) -> "Assignment":
        a = Assignment(self.num_vars)
        a.values = list(self.values)
        a.level_of = list(self.level_of)
        a.reason_of = list(self.reason_of)
        a.trail = list(self.trail)
        a.level = self.level
        return a

    def as_model(self, default: bool = False) -> Model:
        return {v: (default if b is None else b) for v, b in enumerate(self.values) if v}


@dataclass
class PropagationResult:
    conflict: Union[Clause, XorConstraint, None] = None

    @property
    def ok(self) -> bool:
        return self.conflict is None


def propagate(
    formula: CnfFormula, assignment: Assignment, rng: Optional[random.Random] = None
) -> PropagationResult:
    """Unit propagation over clauses and XOR constraints, to fixpoint or conflict.

    The assignment is extended in place.  ``rng`` shuffles the work queue,
    which only exists to test that the outcome does not depend on order.
    """
    values = assignment.values
    if assignment.num_vars < formula.num_vars:
        raise ValueError("assignment is smaller than the formula")
    occ: dict[int, list] = {}
    for c in formula.clauses:
        for lit in c:
            occ.setdefault(-lit, []).append(c)
    xocc: dict[int, list] = {}
    for x in formula.xors:
        for v in x.variables:
            xocc.setdefault(v, []).append(x)

    def lit_val(lit):
        b = values[lit if lit > 0 else -lit]
        if b is None:
            return None
        return b if lit > 0 else not b

    def visit_clause(c):
        unit = None
        for lit in c:
            b = lit_val(lit)
            if b:
                return None, False
            if b is None:
                if unit is not None:
                    return None, False
                unit = lit
        if unit is None:
            return None, True
        return unit, False

    def visit_xor(x):
        free = None
        p = x.parity
        for v in x.variables:
            b = values[v]
            if b is None:
                if free is not None:
                    return None, False
                free = v
            elif b:
                p ^= 1
        if free is None:
            return None, p != 0
        return (free if p else -free), False

    pending = list(formula.clauses) + list(formula.xors)
    head = len(assignment.trail)
    while True:
        if rng is not None:
            rng.shuffle(pending)
        for item in pending:
            if isinstance(item, XorConstraint):
                unit, conflict = visit_xor(item)
            else:
                unit, conflict = visit_clause(item)
            if conflict:
                return PropagationResult(item)
            if unit is not None and values[var(unit)] is None:
                assignment.assign(unit, item)
        if head == len(assignment.trail):
            return PropagationResult()
        pending = []
        for lit in assignment.trail[head:]:
            pending.extend(occ.get(lit, ()))
            pending.extend(xocc.get(var(lit), ()))
        head = len(assignment.trail)


def residual(formula: CnfFormula, assignment: Assignment) -> CnfFormula:
    """Formula over the unassigned variables; variable indices are kept."""
    out = CnfFormula(formula.num_vars)
    seen: set[Clause] = set()
    for c in formula.clauses:
        kept = []
        for lit in c:
            b = assignment.value(lit)
            if b:
                break
            if b is None:
                kept.append(lit)
        else:
            if len(kept) < 2:
                raise ValueError(
                    f"assignment is not a conflict-free fixpoint (clause {c})"
                )
            c2 = tuple(kept)
            if c2 not in seen:
                seen.add(c2)
                out.clauses.append(c2)
    xseen: set[XorConstraint] = set()
    for x in formula.xors:
        p = x.parity
        kept = []
        for v in x.variables:
            b = assignment.values[v]
            if b is None:
                kept.append(v)
            elif b:
                p ^= 1
        if len(kept) == 0:
            if p:
                raise ValueError(f"assignment violates {x}")
            continue
        if len(kept) == 1:
            raise ValueError(f"assignment is not a propagation fixpoint ({x})")
        x2 = XorConstraint(tuple(kept), p)
        if x2 not in xseen:
            xseen.add(x2)
            out.xors.append(x2)
    return out


def evaluate(formula: CnfFormula, model: Mapping[int, bool]) -> bool:
    for v in range(1, formula.num_vars + 1):
        if v not in model:
            raise ValueError(f"model does not assign variable {v}")
    for c in formula.clauses:
        for lit in c:
            if model[lit] if lit > 0 else not model[-lit]:
                break
        else:
            return False
    return all(x.satisfied_by(model) for x in formula.xors)
