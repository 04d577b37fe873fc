"""Brute-force satisfiability and entailment, used as ground truth in tests.

Enumeration is bit-parallel: each variable's column of the truth table is a
packed uint64 array, so a clause costs a handful of vectorized ORs.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Optional

import numpy as np

from .cnf import CnfFormula, Model, XorConstraint, evaluate, var

MAX_VARS = 24

_LOW_PATTERNS = [
    0xAAAAAAAAAAAAAAAA,
    0xCCCCCCCCCCCCCCCC,
    0xF0F0F0F0F0F0F0F0,
    0xFF00FF00FF00FF00,
    0xFFFF0000FFFF0000,
    0xFFFFFFFF00000000,
]
_ALL = np.uint64(0xFFFFFFFFFFFFFFFF)


class OracleError(ValueError):
    pass


@dataclass
class OracleVerdict:
    status: str  # "SAT" or "UNSAT"
    model: Optional[Model] = None

    @property
    def sat(self) -> bool:
        return self.status == "SAT"


def _columns(n: int) -> tuple[list[np.ndarray], np.ndarray]:
    words = max(1, (1 << n) >> 6)
    idx = np.arange(words, dtype=np.uint64)
    cols = [None]
    for i in range(n):
        if i < 6:
            cols.append(np.full(words, _LOW_PATTERNS[i], dtype=np.uint64))
        else:
            bit = (idx >> np.uint64(i - 6)) & np.uint64(1)
            cols.append(np.where(bit == 1, _ALL, np.uint64(0)))
    live = np.full(words, _ALL, dtype=np.uint64)
    if n < 6:
        live[:] = np.uint64((1 << (1 << n)) - 1)
    return cols, live


def _satisfying_mask(formula: CnfFormula) -> np.ndarray:
    n = formula.num_vars
    cols, acc = _columns(n)
    for c in formula.clauses:
        if not c:
            return np.zeros_like(acc)
        col = np.zeros_like(acc)
        for lit in c:
            col |= cols[lit] if lit > 0 else ~cols[-lit]
        acc &= col
        if not acc.any():
            return acc
    for x in formula.xors:
        p = np.zeros_like(acc)
        for v in x.variables:
            p ^= cols[v]
        acc &= p if x.parity else ~p
        if not acc.any():
            return acc
    return acc


def _decode(n: int, mask: np.ndarray) -> Model:
    w = int(np.flatnonzero(mask)[0])
    word = int(mask[w])
    bit = (word & -word).bit_length() - 1
    k = (w << 6) | bit
    return {v: bool((k >> (v - 1)) & 1) for v in range(1, n + 1)}


def brute_force_sat(formula: CnfFormula) -> OracleVerdict:
    n = formula.num_vars
    if n > MAX_VARS:
        raise OracleError(f"{n} variables exceeds the oracle cap of {MAX_VARS}")
    mask = _satisfying_mask(formula)
    if not mask.any():
        return OracleVerdict("UNSAT")
    return OracleVerdict("SAT", _decode(n, mask))


def count_models(formula: CnfFormula) -> int:
    if formula.num_vars > MAX_VARS:
        raise OracleError("variable cap exceeded")
    return sum(int(w).bit_count() for w in _satisfying_mask(formula))


def model_set(formula: CnfFormula, num_vars: Optional[int] = None) -> frozenset[int]:
    """All models as integers (bit v-1 is variable v), over ``num_vars`` variables."""
    f = formula
    if num_vars is not None and num_vars != formula.num_vars:
        f = CnfFormula(num_vars, formula.clauses, formula.xors)
    if f.num_vars > 16:
        raise OracleError("model sets are only enumerated up to 16 variables")
    mask = _satisfying_mask(f)
    out = []
    for w, word in enumerate(mask.tolist()):
        while word:
            low = word & -word
            out.append((w << 6) | (low.bit_length() - 1))
            word ^= low
    return frozenset(out)


def entails(premise: CnfFormula, consequence) -> bool:
    """Does ``premise`` entail ``antecedent -> AND(consequent)``?

    ``consequence`` is anything with ``antecedent`` and ``consequent``
    literal collections (a rule-engine Consequence).
    """
    ante = list(consequence.antecedent)
    n = max([premise.num_vars] + [var(l) for l in ante] + [var(m) for m in consequence.consequent])
    if n > MAX_VARS:
        raise OracleError("variable cap exceeded")
    base = CnfFormula(n, list(premise.clauses) + [(l,) for l in ante], list(premise.xors))
    for m in consequence.consequent:
        f = CnfFormula(n, base.clauses + [(-m,)], base.xors)
        if brute_force_sat(f).sat:
            return False
    return True


def brute_force_projected(formula: CnfFormula, branch_vars: Iterable[int]) -> OracleVerdict:
    """Enumerate assignments of ``branch_vars`` and close each one by unit propagation.

    Complete whenever every enumerated assignment either propagates to a
    conflict or to a total assignment (true for Tseitin encodings when the
    circuit inputs are enumerated); otherwise the leftover variables are
    brute-forced under the usual cap.  The propagation here is a naive
    fixpoint loop written independently of the solver's.
    """
    branch_vars = sorted(set(branch_vars))
    if len(branch_vars) > MAX_VARS:
        raise OracleError("variable cap exceeded")
    n = formula.num_vars
    clauses = formula.clauses
    xors = formula.xors
    occ: dict[int, list[int]] = {}
    for i, c in enumerate(clauses):
        for lit in c:
            occ.setdefault(var(lit), []).append(i)
    xocc: dict[int, list[int]] = {}
    for i, x in enumerate(xors):
        for v in x.variables:
            xocc.setdefault(v, []).append(i)

    for k in range(1 << len(branch_vars)):
        vals: dict[int, bool] = {v: bool((k >> i) & 1) for i, v in enumerate(branch_vars)}
        todo_c = set(range(len(clauses)))
        todo_x = set(range(len(xors)))
        conflict = False
        while (todo_c or todo_x) and not conflict:
            new: list[int] = []
            for i in todo_c:
                free = []
                for lit in clauses[i]:
                    b = vals.get(var(lit))
                    if b is None:
                        free.append(lit)
                    elif b == (lit > 0):
                        break
                else:
                    if not free:
                        conflict = True
                        break
                    if len(free) == 1:
                        new.append(free[0])
            if conflict:
                break
            for i in todo_x:
                x = xors[i]
                free = [v for v in x.variables if v not in vals]
                p = x.parity
                for v in x.variables:
                    if vals.get(v):
                        p ^= 1
                if not free and p:
                    conflict = True
                    break
                if len(free) == 1:
                    new.append(free[0] if p else -free[0])
            if conflict or not new:
                break
            todo_c, todo_x = set(), set()
            for lit in new:
                v = var(lit)
                if v in vals:
                    if vals[v] != (lit > 0):
                        conflict = True
                        break
                    continue
                vals[v] = lit > 0
                todo_c.update(occ.get(v, ()))
                todo_x.update(xocc.get(v, ()))
        if conflict:
            continue
        rest = [v for v in range(1, n + 1) if v not in vals]
        if not rest:
            if evaluate(formula, vals):
                return OracleVerdict("SAT", dict(sorted(vals.items())))
            continue
        if len(rest) > MAX_VARS:
            raise OracleError("propagation left too many free variables")
        sub = _restrict(formula, vals, rest)
        verdict = brute_force_sat(sub)
        if verdict.sat:
            model = dict(vals)
            for i, v in enumerate(rest):
                model[v] = verdict.model[i + 1]
            return OracleVerdict("SAT", dict(sorted(model.items())))
    return OracleVerdict("UNSAT")


def _restrict(formula: CnfFormula, vals: dict[int, bool], rest: list[int]) -> CnfFormula:
    """Formula over ``rest`` (renumbered 1..len(rest)) under the partial ``vals``."""
    ren = {v: i + 1 for i, v in enumerate(rest)}
    out = CnfFormula(len(rest))
    for c in formula.clauses:
        kept = []
        for lit in c:
            b = vals.get(var(lit))
            if b is None:
                kept.append(ren[lit] if lit > 0 else -ren[-lit])
            elif b == (lit > 0):
                break
        else:
            out.clauses.append(tuple(kept))
    for x in formula.xors:
        p = x.parity
        kept = []
        for v in x.variables:
            if v in vals:
                p ^= vals[v]
            else:
                kept.append(ren[v])
        if len(kept) >= 2:
            out.xors.append(XorConstraint(tuple(kept), p))
        elif len(kept) == 1:
            out.clauses.append((kept[0],) if p else (-kept[0],))
        elif p:
            out.clauses.append(())
    return out
