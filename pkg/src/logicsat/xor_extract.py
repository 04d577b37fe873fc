"""Recover XOR constraints from their clausal expansions.

Clauses are grouped by variable set.  Over k variables a full XOR image is
the 2^(k-1) sign patterns of one negation-count parity: an even number of
negations encodes parity 1, an odd number parity 0.
"""

from __future__ import annotations

import time
from collections import Counter
from dataclasses import dataclass, field

from .cnf import CnfFormula, XorConstraint, var

DEFAULT_MAX_ARITY = 4


@dataclass
class ExtractionReport:
    xors_found: Counter = field(default_factory=Counter)
    clauses_consumed: int = 0
    scan_time: float = 0.0

    @property
    def total(self) -> int:
        return sum(self.xors_found.values())


def extract_xors(
    formula: CnfFormula, max_arity: int = DEFAULT_MAX_ARITY
) -> tuple[CnfFormula, ExtractionReport]:
    if not 2 <= max_arity <= 6:
        raise ValueError("max_arity must be between 2 and 6")
    t0 = time.perf_counter()
    report = ExtractionReport()
    groups: dict[tuple[int, ...], dict[int, set]] = {}
    for c in formula.clauses:
        if 2 <= len(c) <= max_arity:
            key = tuple(var(l) for l in c)
            parity = sum(l < 0 for l in c) & 1
            groups.setdefault(key, {0: set(), 1: set()})[parity].add(c)

    consumed: set[tuple[int, ...]] = set()
    new_xors: list[XorConstraint] = []
    conflict = False
    for key in sorted(groups):
        need = 1 << (len(key) - 1)
        g = groups[key]
        full = [neg_parity for neg_parity in (0, 1) if len(g[neg_parity]) == need]
        if len(full) == 2:
            # both classes forbid every assignment over these variables
            conflict = True
            consumed |= g[0] | g[1]
            continue
        if full:
            neg_parity = full[0]
            consumed |= g[neg_parity]
            new_xors.append(XorConstraint(key, 1 - neg_parity))
            report.xors_found[len(key)] += 1
            report.clauses_consumed += need

    out = CnfFormula(formula.num_vars, [], list(formula.xors))
    seen = set(formula.xors)
    for c in formula.clauses:
        if c in consumed:
            continue
        out.clauses.append(c)
    if conflict:
        out.clauses.append(())
    for x in new_xors:
        if x not in seen:
            seen.add(x)
            out.xors.append(x)
    report.scan_time = time.perf_counter() - t0
    return out, report
