"""Hidden-weighted-bit circuits and their equivalence-checking miters.

HWB_n(x_1..x_n) = x_s where s is the number of true inputs (x_0 = 0).  Two
structurally different circuits compute it:

* ``sorter``: a Batcher odd-even merge network sorts the inputs so that
  s_i is true iff at least i inputs are; the output is
  OR_i (s_i & -s_{i+1} & x_i).
* ``counter-mux``: a carry-save tree of full and half adders produces the
  binary count, which addresses a multiplexer tree over x_1..x_n.

Wires are integers: 0 and 1 are the constants, inputs are 2..n+1, gates
follow in creation order.  Builders fold constants, so a finished circuit
only refers to constants where a gate could not absorb them.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

from .cnf import CnfFormula

FALSE, TRUE = 0, 1
GENERATOR_VERSION = "1"
VARIANTS = ("sorter", "counter-mux")


@dataclass
class Circuit:
    n: int
    gates: list[tuple[int, str, tuple[int, ...]]] = field(default_factory=list)
    output: int = FALSE

    @property
    def inputs(self) -> list[int]:
        return list(range(2, self.n + 2))

    def _new(self, kind: str, ins: tuple[int, ...]) -> int:
        w = self.n + 2 + len(self.gates)
        self.gates.append((w, kind, ins))
        return w

    def NOT(self, a: int) -> int:
        if a in (FALSE, TRUE):
            return 1 - a
        return self._new("NOT", (a,))

    def AND(self, a: int, b: int) -> int:
        if FALSE in (a, b):
            return FALSE
        if a == TRUE or a == b:
            return b
        if b == TRUE:
            return a
        return self._new("AND", (a, b))

    def OR(self, a: int, b: int) -> int:
        if TRUE in (a, b):
            return TRUE
        if a == FALSE or a == b:
            return b
        if b == FALSE:
            return a
        return self._new("OR", (a, b))

    def XOR(self, a: int, b: int) -> int:
        if a == FALSE:
            return b
        if b == FALSE:
            return a
        if a == TRUE:
            return self.NOT(b)
        if b == TRUE:
            return self.NOT(a)
        if a == b:
            return FALSE
        return self._new("XOR", (a, b))

    def MUX(self, s: int, a: int, b: int) -> int:
        """s ? a : b"""
        if s == TRUE or a == b:
            return a
        if s == FALSE:
            return b
        if a == TRUE and b == FALSE:
            return s
        if b == FALSE:
            return self.AND(s, a)
        if a == TRUE:
            return self.OR(s, b)
        if a == FALSE:
            return self.AND(self.NOT(s), b)
        if b == TRUE:
            return self.OR(self.NOT(s), a)
        return self._new("MUX", (s, a, b))

    def simulate(self, bits: Sequence[bool]) -> bool:
        if len(bits) != self.n:
            raise ValueError(f"expected {self.n} input bits")
        w = [False, True] + [bool(b) for b in bits]
        for out, kind, ins in self.gates:
            v = [w[i] for i in ins]
            if kind == "NOT":
                r = not v[0]
            elif kind == "AND":
                r = v[0] and v[1]
            elif kind == "OR":
                r = v[0] or v[1]
            elif kind == "XOR":
                r = v[0] != v[1]
            else:
                r = v[1] if v[0] else v[2]
            w.append(r)
        return w[self.output]


def hwb_reference(bits: Sequence[bool]) -> bool:
    s = sum(1 for b in bits if b)
    return bool(bits[s - 1]) if s else False


def _oddeven_merge_sort(lo: int, n: int):
    """Comparator pairs of Batcher's network on positions lo..lo+n-1 (n a power of 2)."""
    if n > 1:
        m = n // 2
        yield from _oddeven_merge_sort(lo, m)
        yield from _oddeven_merge_sort(lo + m, m)
        yield from _oddeven_merge(lo, n, 1)


def _oddeven_merge(lo: int, n: int, r: int):
    step = r * 2
    if step < n:
        yield from _oddeven_merge(lo, n, step)
        yield from _oddeven_merge(lo + r, n, step)
        for i in range(lo + r, lo + n - r, step):
            yield (i, i + r)
    else:
        yield (lo, lo + r)


def _sorter(c: Circuit) -> int:
    n = c.n
    size = 1
    while size < n:
        size *= 2
    s = c.inputs + [FALSE] * (size - n)
    for i, j in _oddeven_merge_sort(0, size):
        # descending: larger value to the lower index
        s[i], s[j] = c.OR(s[i], s[j]), c.AND(s[i], s[j])
    s = s[:n] + [FALSE]
    out = FALSE
    for i, x in enumerate(c.inputs):
        exactly = c.AND(s[i], c.NOT(s[i + 1]))
        out = c.OR(out, c.AND(exactly, x))
    return out


def _counter_mux(c: Circuit) -> int:
    n = c.n
    width = n.bit_length()
    columns: list[list[int]] = [list(c.inputs)] + [[] for _ in range(width)]
    count = []
    for w in range(width):
        col = columns[w]
        while len(col) >= 3:
            a, b, cin = col.pop(0), col.pop(0), col.pop(0)
            t = c.XOR(a, b)
            col.append(c.XOR(t, cin))
            columns[w + 1].append(c.MUX(t, cin, a))
        if len(col) == 2:
            a, b = col
            col[:] = [c.XOR(a, b)]
            columns[w + 1].append(c.AND(a, b))
        count.append(col[0] if col else FALSE)
    leaves = [FALSE] + c.inputs + [FALSE] * ((1 << width) - n - 1)
    for bit in count:
        leaves = [c.MUX(bit, leaves[k + 1], leaves[k]) for k in range(0, len(leaves), 2)]
    return leaves[0]


def build_circuit(n: int, variant: str, self_check: bool = False) -> Circuit:
    if n < 1:
        raise ValueError("n must be positive")
    c = Circuit(n)
    if variant == "sorter":
        c.output = _sorter(c)
    elif variant == "counter-mux":
        c.output = _counter_mux(c)
    else:
        raise ValueError(f"unknown variant {variant!r}")
    if self_check:
        if n > 12:
            raise ValueError("self-check is exhaustive; limited to n <= 12")
        for k in range(1 << n):
            bits = [bool((k >> i) & 1) for i in range(n)]
            if c.simulate(bits) != hwb_reference(bits):
                raise AssertionError(f"{variant} circuit disagrees with HWB on {bits}")
    return c


def tseitin_encode(
    circuit: Circuit, first_free_var: int, input_lits: Sequence[int] | None = None
) -> tuple[list[tuple[int, ...]], int, dict[int, int]]:
    """Clauses, output literal and wire -> literal map.

    Inputs take ``input_lits`` (default: fresh variables), each gate a fresh
    variable in topological order.  Constant wires are folded away; a
    constant output is returned as a literal over a fresh variable pinned by
    a unit clause.
    """
    nxt = first_free_var
    lit: dict[int, int] = {}
    clauses: list[tuple[int, ...]] = []
    if input_lits is None:
        input_lits = list(range(nxt, nxt + circuit.n))
        nxt += circuit.n
    for w, x in zip(circuit.inputs, input_lits):
        lit[w] = x

    const: dict[int, bool] = {FALSE: False, TRUE: True}
    for out, kind, ins in circuit.gates:
        if any(i in const for i in ins):
            raise ValueError("circuit gate has an unfolded constant input")
        o = nxt
        nxt += 1
        lit[out] = o
        a = lit[ins[0]]
        if kind == "NOT":
            clauses += [(o, a), (-o, -a)]
        elif kind == "AND":
            b = lit[ins[1]]
            clauses += [(-o, a), (-o, b), (o, -a, -b)]
        elif kind == "OR":
            b = lit[ins[1]]
            clauses += [(o, -a), (o, -b), (-o, a, b)]
        elif kind == "XOR":
            b = lit[ins[1]]
            clauses += [(-o, a, b), (-o, -a, -b), (o, -a, b), (o, a, -b)]
        elif kind == "MUX":
            t, e = lit[ins[1]], lit[ins[2]]
            clauses += [(-a, -t, o), (-a, t, -o), (a, -e, o), (a, e, -o)]
        else:
            raise ValueError(f"unknown gate kind {kind}")
    if circuit.output in const:
        o = nxt
        clauses.append((o,) if const[circuit.output] else (-o,))
        lit[circuit.output] = o
    return clauses, lit[circuit.output], lit


def build_miter(n: int, negate_second: bool = False) -> CnfFormula:
    """UNSAT CNF asserting that the sorter and counter-mux circuits differ.

    ``negate_second`` flips one circuit's output, producing a satisfiable
    miter (used to check that the construction is not vacuous).
    """
    f = CnfFormula(n)
    inputs = list(range(1, n + 1))
    out_lits = []
    nxt = n + 1
    for variant in VARIANTS:
        cs, o, _ = tseitin_encode(build_circuit(n, variant), nxt, inputs)
        nxt = max([nxt - 1] + [abs(l) for c in cs for l in c] + [abs(o)]) + 1
        for c in cs:
            f.add_clause(c)
        out_lits.append(o)
    a, b = out_lits
    if negate_second:
        b = -b
    f.add_clause((a, b))
    f.add_clause((-a, -b))
    f.num_vars = nxt - 1
    return f


def miter_comments(n: int) -> tuple[str, ...]:
    return (
        f"hwb miter n={n}",
        f"variants {VARIANTS[0]} vs {VARIANTS[1]}",
        f"generator logicsat-hwb {GENERATOR_VERSION}",
        "expected: UNSAT",
    )
