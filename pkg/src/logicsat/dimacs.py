"""DIMACS CNF reader/writer with the ``x`` line extension for XOR constraints."""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations
from typing import Union

from .cnf import CnfFormula, XorConstraint, var, xor_from_literals


class DimacsError(ValueError):
    def __init__(self, line: int, message: str):
        super().__init__(f"line {line}: {message}")
        self.line = line


@dataclass
class ParseDiagnostics:
    warnings: list[tuple[int, str]] = field(default_factory=list)
    declared_vars: int = 0
    declared_clauses: int = 0
    comments: list[str] = field(default_factory=list)


def parse_dimacs(
    text: Union[bytes, str], require_header: bool = False
) -> tuple[CnfFormula, ParseDiagnostics]:
    if isinstance(text, bytes):
        text = text.decode("utf-8", errors="replace")
    diag = ParseDiagnostics()
    formula = CnfFormula()
    header_seen = False
    pending: list[int] = []
    pending_xor = False
    pending_line = 0
    n_clauses = 0

    def flush(lineno):
        nonlocal pending, pending_xor, n_clauses
        lits = pending
        pending = []
        n_clauses += 1
        mx = max((var(l) for l in lits), default=0)
        if mx > formula.num_vars:
            if header_seen:
                diag.warnings.append(
                    (lineno, f"variable {mx} exceeds declared count {formula.num_vars}")
                )
            formula.num_vars = mx
        if pending_xor:
            pending_xor = False
            r = xor_from_literals(lits)
            if isinstance(r, XorConstraint):
                formula.xors.append(r)
            elif r is not None:
                formula.clauses.append(r)
            return
        if len(set(lits)) != len(lits):
            diag.warnings.append((lineno, "duplicate literal removed"))
        if not formula.add_clause(lits):
            diag.warnings.append((lineno, "tautological clause dropped"))

    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line:
            continue
        if line[0] == "c":
            diag.comments.append(line[1:].strip())
            continue
        if line[0] == "%":
            break
        if line[0] == "p":
            parts = line.split()
            if header_seen:
                raise DimacsError(lineno, "second header line")
            if len(parts) != 4 or parts[1] != "cnf":
                raise DimacsError(lineno, f"bad header {line!r}")
            try:
                nv, nc = int(parts[2]), int(parts[3])
            except ValueError:
                raise DimacsError(lineno, f"bad header {line!r}") from None
            if nv < 0 or nc < 0:
                raise DimacsError(lineno, "negative header count")
            header_seen = True
            diag.declared_vars, diag.declared_clauses = nv, nc
            formula.num_vars = max(formula.num_vars, nv)
            continue
        if require_header and not header_seen:
            raise DimacsError(lineno, "clause before header")
        tokens = line.split()
        if tokens[0] == "x":
            if pending:
                raise DimacsError(lineno, "XOR line inside an unterminated clause")
            pending_xor = True
            pending_line = lineno
            tokens = tokens[1:]
        elif not pending:
            pending_line = lineno
        for tok in tokens:
            try:
                lit = int(tok)
            except ValueError:
                raise DimacsError(lineno, f"malformed token {tok!r}") from None
            if lit == 0:
                flush(lineno)
                pending_line = lineno
            else:
                pending.append(lit)
    if pending or pending_xor:
        raise DimacsError(pending_line, "missing terminating 0")
    if header_seen and n_clauses != diag.declared_clauses:
        diag.warnings.append(
            (0, f"header declares {diag.declared_clauses} clauses, found {n_clauses}")
        )
    return formula, diag


def expand_xor(x: XorConstraint) -> list[tuple[int, ...]]:
    """The 2^(k-1) clauses forbidding every assignment of the wrong parity.

    A clause with negated set N forbids the assignment that makes exactly N
    true; that assignment has parity |N| mod 2, so the forbidden class needs
    |N| = parity + 1 (mod 2).
    """
    vs = x.variables
    want = (x.parity + 1) & 1
    out = []
    for r in range(want, len(vs) + 1, 2):
        for negs in combinations(vs, r):
            ns = set(negs)
            out.append(tuple(-v if v in ns else v for v in vs))
    out.sort(key=lambda c: [l < 0 for l in c])
    return out


def expand_xors(formula: CnfFormula) -> CnfFormula:
    out = CnfFormula(formula.num_vars, list(formula.clauses))
    for x in formula.xors:
        out.clauses.extend(expand_xor(x))
    return out


def write_dimacs(
    formula: CnfFormula, xor_mode: str = "native", comments: tuple[str, ...] = ()
) -> bytes:
    if xor_mode not in ("native", "expand"):
        raise ValueError("xor_mode is 'native' or 'expand'")
    lines = [f"c {c}" if c else "c" for c in comments]
    body = [" ".join(map(str, c)) + " 0" if c else "0" for c in formula.clauses]
    for x in formula.xors:
        if xor_mode == "native":
            # the line asserts the literal XOR is true; negate one literal for parity 0
            lits = list(x.variables)
            if not x.parity:
                lits[0] = -lits[0]
            body.append("x " + " ".join(map(str, lits)) + " 0")
        else:
            body.extend(" ".join(map(str, c)) + " 0" for c in expand_xor(x))
    lines.append(f"p cnf {formula.num_vars} {len(body)}")
    lines.extend(body)
    return ("\n".join(lines) + "\n").encode()
