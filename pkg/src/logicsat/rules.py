"""Seven inference rules over XOR constraints plus short clauses.

Every rule pairs an XOR premise (A^B^C = 1 or A^B^C^D = 1, letters bound to
literals) with a few binary or ternary clauses, and licenses an implication
``antecedent -> AND(consequent)``:

    1  A^B^C=1, (A|D)(-B|D)                         C -> D
    2  A^B^C=1, (A|B)(A|C)                          A
    3  A^B^C=1, (A|B)(A|C)(B|C)                     A & B & C
    4  A^B^C^D=1, (A|B)(A|C)(B|C)                   -D -> A & B & C
    5  A^B^C=1, (A|B|D)(-A|-B|-D)(A|C|D)
                (-A|-C|-D)(B|C|D)(-B|-C|-D)         -D -> A & B & C
    6  A^B^C^D=1, (A|B|E)(A|C|E)(B|C|E)             -D & -E -> A & B & C
    7  A^B^C^D=1, (-A|-B|-E)(-A|-C|-E)(-B|-C|-E)    D & E -> -A & -B & -C

An XOR over literals is read through the stored variable-level constraint:
each negative literal flips the parity.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import product
from typing import Iterable, Optional

from .cnf import Clause, CnfFormula, XorConstraint, lit_key, make_clause, var
from .oracle import entails

LETTERS = "ABCDE"
RULE_ARITY = {1: 4, 2: 3, 3: 3, 4: 4, 5: 4, 6: 5, 7: 5}


@dataclass(frozen=True)
class RuleMatch:
    rule: int
    lits: tuple[int, ...]  # bindings for A, B, C, ... in letter order

    def __post_init__(self):
        if len(self.lits) != RULE_ARITY[self.rule]:
            raise ValueError(f"rule {self.rule} binds {RULE_ARITY[self.rule]} letters")
        if len({var(l) for l in self.lits}) != len(self.lits):
            raise ValueError("bound literals must be over distinct variables")

    def __getitem__(self, letter: str) -> int:
        return self.lits[LETTERS.index(letter)]

    @property
    def bindings(self) -> dict[str, int]:
        return dict(zip(LETTERS, self.lits))

    def dump(self) -> str:
        return f"r{self.rule} " + " ".join(f"{k}={v}" for k, v in self.bindings.items())

    def sort_key(self):
        return (self.rule, tuple(lit_key(l) for l in self.lits))


@dataclass(frozen=True)
class Consequence:
    antecedent: tuple[int, ...]
    consequent: tuple[int, ...]
    source: Optional[RuleMatch] = None


def premise(match: RuleMatch) -> tuple[tuple[int, ...], list[tuple[int, ...]]]:
    """The XOR (as literals whose XOR is 1) and the clauses a match requires."""
    r = match.rule
    A, B, C = match.lits[:3]
    if r == 1:
        D = match.lits[3]
        return (A, B, C), [(A, D), (-B, D)]
    if r == 2:
        return (A, B, C), [(A, B), (A, C)]
    if r == 3:
        return (A, B, C), [(A, B), (A, C), (B, C)]
    D = match.lits[3]
    if r == 4:
        return (A, B, C, D), [(A, B), (A, C), (B, C)]
    if r == 5:
        return (A, B, C), [
            (A, B, D), (-A, -B, -D), (A, C, D), (-A, -C, -D), (B, C, D), (-B, -C, -D)
        ]
    E = match.lits[4]
    if r == 6:
        return (A, B, C, D), [(A, B, E), (A, C, E), (B, C, E)]
    return (A, B, C, D), [(-A, -B, -E), (-A, -C, -E), (-B, -C, -E)]


def consequence_of(match: RuleMatch) -> Consequence:
    r = match.rule
    A, B, C = match.lits[:3]
    if r == 1:
        return Consequence((C,), (match.lits[3],), match)
    if r == 2:
        return Consequence((), (A,), match)
    if r == 3:
        return Consequence((), (A, B, C), match)
    D = match.lits[3]
    if r in (4, 5):
        return Consequence((-D,), (A, B, C), match)
    E = match.lits[4]
    if r == 6:
        return Consequence((-D, -E), (A, B, C), match)
    return Consequence((D, E), (-A, -B, -C), match)


class _Index:
    def __init__(self, formula: CnfFormula):
        self.clauses = set(formula.clauses)
        self.binary: dict[int, set[int]] = {}
        self.ternary: dict[tuple[int, int], set[int]] = {}
        for c in formula.clauses:
            if len(c) == 2:
                a, b = c
                self.binary.setdefault(a, set()).add(b)
                self.binary.setdefault(b, set()).add(a)
            elif len(c) == 3:
                for i in range(3):
                    rest = c[:i] + c[i + 1:]
                    self.ternary.setdefault(rest, set()).add(c[i])

    def has(self, *lits: int) -> bool:
        return make_clause(lits) in self.clauses

    def partners(self, lit: int) -> set[int]:
        return self.binary.get(lit, set())

    def thirds(self, a: int, b: int) -> set[int]:
        key = (a, b) if lit_key(a) < lit_key(b) else (b, a)
        return self.ternary.get(key, set())


def _signed(vs: Iterable[int], odd_negations: int):
    """Sign patterns over ``vs`` whose negation count has the given parity."""
    vs = tuple(vs)
    for signs in product((1, -1), repeat=len(vs)):
        if (sum(s < 0 for s in signs) & 1) == odd_negations:
            yield tuple(s * v for s, v in zip(signs, vs))


def _match_xor3(x: XorConstraint, idx: _Index, out: list[RuleMatch]) -> None:
    # literals A,B,C with A^B^C = 1 need (1 ^ parity) negations
    odd = 1 ^ x.parity
    vs = x.variables
    xv = set(vs)
    for A, B, C in _signed(vs, odd):
        # rule 3 and rule 5 are symmetric in A,B,C: keep the sorted order only
        if idx.has(A, B) and idx.has(A, C) and idx.has(B, C):
            out.append(RuleMatch(3, (A, B, C)))
        for D in idx.thirds(A, B):
            if var(D) in xv:
                continue
            if (idx.has(-A, -B, -D) and idx.has(A, C, D) and idx.has(-A, -C, -D)
                    and idx.has(B, C, D) and idx.has(-B, -C, -D)):
                out.append(RuleMatch(5, (A, B, C, D)))
    for perm in ((0, 1, 2), (1, 0, 2), (2, 0, 1)):
        # rule 2: A is distinguished, B and C symmetric (kept in variable order)
        a, b, c = (vs[i] for i in perm)
        for A, B, C in _signed((a, b, c), odd):
            if idx.has(A, B) and idx.has(A, C):
                out.append(RuleMatch(2, (A, B, C)))
    for perm in ((0, 1, 2), (0, 2, 1), (1, 0, 2), (1, 2, 0), (2, 0, 1), (2, 1, 0)):
        # rule 1: C is distinguished; (A, B) and (-B, -A) give the same premise
        a, b, c = (vs[i] for i in perm)
        for A, B, C in _signed((a, b, c), odd):
            if lit_key(A) > lit_key(-B):
                continue
            for D in idx.partners(A):
                if var(D) in xv:
                    continue
                if idx.has(-B, D):
                    out.append(RuleMatch(1, (A, B, C, D)))


def _match_xor4(x: XorConstraint, idx: _Index, out: list[RuleMatch]) -> None:
    odd = 1 ^ x.parity
    vs = x.variables
    xv = set(vs)
    for i in range(4):
        d = vs[i]
        abc = vs[:i] + vs[i + 1:]
        for signs in product((1, -1), repeat=3):
            A, B, C = (s * v for s, v in zip(signs, abc))
            negs = sum(s < 0 for s in signs)
            D = -d if (negs & 1) != odd else d
            if idx.has(A, B) and idx.has(A, C) and idx.has(B, C):
                out.append(RuleMatch(4, (A, B, C, D)))
            for E in idx.thirds(A, B):
                if var(E) in xv:
                    continue
                if idx.has(A, C, E) and idx.has(B, C, E):
                    out.append(RuleMatch(6, (A, B, C, D, E)))
            for t in idx.thirds(-A, -B):
                E = -t
                if var(E) in xv:
                    continue
                if idx.has(-A, -C, -E) and idx.has(-B, -C, -E):
                    out.append(RuleMatch(7, (A, B, C, D, E)))


def match_rules(formula: CnfFormula, rules: Iterable[int] = range(1, 8)) -> list[RuleMatch]:
    """Every binding of the selected rules, deduplicated and canonically ordered."""
    wanted = set(rules)
    idx = _Index(formula)
    found: list[RuleMatch] = []
    for x in formula.xors:
        if x.arity == 3:
            _match_xor3(x, idx, found)
        elif x.arity == 4:
            _match_xor4(x, idx, found)
    uniq = {m for m in found if m.rule in wanted}
    return sorted(uniq, key=RuleMatch.sort_key)


def encode_cnf(consequences: Iterable[Consequence]) -> list[Clause]:
    out: list[Clause] = []
    seen: set[Clause] = set()
    for cq in consequences:
        guard = [-l for l in cq.antecedent]
        for m in cq.consequent:
            c = make_clause(guard + [m])
            if c is None or c in seen:
                continue
            seen.add(c)
            out.append(c)
    return out


def derive(formula: CnfFormula, rules: Iterable[int] = range(1, 8)):
    """Matches, their consequences, and the clausal encoding in one pass."""
    matches = match_rules(formula, rules)
    cons = [consequence_of(m) for m in matches]
    return matches, cons, encode_cnf(cons)


def premise_formula(match: RuleMatch, formula: CnfFormula) -> CnfFormula:
    """The part of ``formula`` a match relies on, renumbered onto 1..k.

    Includes every XOR of the formula over the match's XOR variables (with
    the parity actually stored) and those required clauses actually present.
    """
    xlits, clauses = premise(match)
    ren = {var(l): i + 1 for i, l in enumerate(match.lits)}

    def r(l):
        return ren[l] if l > 0 else -ren[-l]

    xvars = tuple(sorted(var(l) for l in xlits))
    present = set(formula.clauses)
    sub = CnfFormula(len(ren))
    for x in formula.xors:
        if x.variables == xvars:
            sub.add_xor([ren[v] for v in x.variables], x.parity)
    for c in clauses:
        if make_clause(c) in present:
            sub.add_clause([r(l) for l in c])
    return sub


def verify_match(match: RuleMatch, formula: CnfFormula) -> bool:
    """Oracle check that the premise found in ``formula`` entails the consequence."""
    ren = {var(l): i + 1 for i, l in enumerate(match.lits)}

    def r(l):
        return ren[l] if l > 0 else -ren[-l]

    cq = consequence_of(match)
    renamed = Consequence(tuple(map(r, cq.antecedent)), tuple(map(r, cq.consequent)))
    return entails(premise_formula(match, formula), renamed)
