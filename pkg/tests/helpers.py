"""Instance generators and deliberately naive reference checkers for tests."""

from __future__ import annotations

import itertools
import random

from logicsat.cnf import CnfFormula
from logicsat.rules import RuleMatch, premise


def random_kcnf(seed: int, n: int, m: int, k: int = 3) -> CnfFormula:
    r = random.Random(seed)
    f = CnfFormula(n)
    for _ in range(m):
        vs = r.sample(range(1, n + 1), k)
        f.add_clause([v if r.random() < 0.5 else -v for v in vs])
    f.num_vars = n
    return f


def random_mixed(seed: int, n: int, m: int, n_xors: int = 2) -> CnfFormula:
    """Random clauses of length 1-4 plus a few native XORs."""
    r = random.Random(seed)
    f = CnfFormula(n)
    for _ in range(m):
        k = r.choice((1, 2, 2, 3, 3, 3, 4)) if n >= 4 else 1
        vs = r.sample(range(1, n + 1), min(k, n))
        f.add_clause([v if r.random() < 0.5 else -v for v in vs])
    for _ in range(n_xors if n >= 2 else 0):
        k = r.randint(2, min(4, n))
        f.add_xor(r.sample(range(1, n + 1), k), r.randint(0, 1))
    f.num_vars = n
    return f


def naive_xor_clauses(lits_xor_true) -> list[tuple[int, ...]]:
    """Clauses forbidding each wrong-parity assignment, found by enumeration."""
    vs = [abs(l) for l in lits_xor_true]
    flips = sum(l < 0 for l in lits_xor_true) & 1
    out = []
    for bits in itertools.product((False, True), repeat=len(vs)):
        if (sum(bits) + flips) % 2 == 0:  # literal XOR would be 0: forbid
            out.append(tuple(-v if b else v for v, b in zip(vs, bits)))
    return out


def random_match(r: random.Random, rule: int, vars_pool) -> RuleMatch:
    from logicsat.rules import RULE_ARITY

    vs = r.sample(list(vars_pool), RULE_ARITY[rule])
    return RuleMatch(rule, tuple(v if r.random() < 0.5 else -v for v in vs))


def plant(f: CnfFormula, match: RuleMatch, expand: bool = True) -> None:
    xlits, clauses = premise(match)
    if expand:
        for c in naive_xor_clauses(xlits):
            f.add_clause(c)
    else:
        parity = 1 ^ (sum(l < 0 for l in xlits) & 1)
        f.add_xor([abs(l) for l in xlits], parity)
    for c in clauses:
        f.add_clause(c)


def planted_formula(seed: int, n: int = 16, patterns: int = 2, filler: int = None,
                    expand: bool = True) -> CnfFormula:
    r = random.Random(seed)
    f = CnfFormula(n)
    for _ in range(patterns):
        plant(f, random_match(r, r.randint(1, 7), range(1, n + 1)), expand)
    if filler is None:
        filler = r.randint(n, 4 * n)
    for _ in range(filler):
        vs = r.sample(range(1, n + 1), 3)
        f.add_clause([v if r.random() < 0.5 else -v for v in vs])
    f.num_vars = n
    return f


def naive_eval(f: CnfFormula, model: dict) -> bool:
    for c in f.clauses:
        if not any(model[abs(l)] == (l > 0) for l in c):
            return False
    for x in f.xors:
        if sum(model[v] for v in x.variables) % 2 != x.parity:
            return False
    return True


def dpll(f: CnfFormula) -> bool:
    """Textbook recursive DPLL over clause sets; XORs are expanded naively."""
    clauses = [frozenset(c) for c in f.clauses]
    for x in f.xors:
        lits = list(x.variables)
        if not x.parity:
            lits[0] = -lits[0]
        clauses += [frozenset(c) for c in naive_xor_clauses(lits)]
    return _dpll(clauses)


def _dpll(clauses) -> bool:
    while True:
        if not clauses:
            return True
        if any(not c for c in clauses):
            return False
        unit = next((next(iter(c)) for c in clauses if len(c) == 1), None)
        if unit is None:
            break
        clauses = [c - {-unit} for c in clauses if unit not in c]
    lit = next(iter(clauses[0]))
    for l in (lit, -lit):
        if _dpll([c - {-l} for c in clauses if l not in c]):
            return True
    return False


def all_models(f: CnfFormula, n: int = None):
    n = f.num_vars if n is None else n
    out = set()
    for bits in itertools.product((False, True), repeat=n):
        m = {i + 1: b for i, b in enumerate(bits)}
        if naive_eval(f, m):
            out.add(bits)
    return out


def planted_xor_formula(seed: int, n: int = 60, n_xors: int = 20, filler: int = 200):
    """Expanded XORs (arity 3-4, distinct variable sets) shuffled among random clauses.

    Returns the formula and the planted XORs as (variables, parity) pairs.
    """
    from logicsat.dimacs import expand_xor
    from logicsat.cnf import XorConstraint

    r = random.Random(seed)
    planted = {}
    while len(planted) < n_xors:
        vs = tuple(sorted(r.sample(range(1, n + 1), r.randint(3, 4))))
        planted.setdefault(vs, r.randint(0, 1))
    clauses = []
    for vs, p in planted.items():
        clauses += expand_xor(XorConstraint(vs, p))
    # filler must not complete a parity class by accident
    classes: dict = {}
    added = 0
    while added < filler:
        vs = sorted(r.sample(range(1, n + 1), r.randint(2, 4)))
        c = tuple(v if r.random() < 0.5 else -v for v in vs)
        key = (tuple(vs), sum(l < 0 for l in c) & 1)
        group = classes.setdefault(key, set())
        if c in group or len(group) + 1 == 1 << (len(vs) - 1):
            continue
        group.add(c)
        clauses.append(list(c))
        added += 1
    r.shuffle(clauses)
    f = CnfFormula(n)
    for c in clauses:
        f.add_clause(c)
    f.num_vars = n
    return f, planted
