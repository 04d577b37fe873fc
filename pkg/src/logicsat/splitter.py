"""Lookahead splitting driver.

The search branches on the ``C`` variables of rule-1 premises first (the
list P), then on the highest-scoring variables of the other rule-1 letters
(the list Q, scored by H(x) = occ(x) * occ(-x) over clauses only).  At depth
|P| + cutoff_offset each subproblem is simplified, strengthened with the
clauses licensed by the seven rules, and handed to the CDCL backend.
"""

from __future__ import annotations

import time
from collections import Counter
from dataclasses import dataclass, field
from typing import Optional

from .cdcl import BudgetExhausted, CdclStats, cdcl_solve
from .cnf import Assignment, CnfFormula, Model, evaluate, propagate, residual, var
from .dimacs import expand_xors
from .rules import derive, match_rules, verify_match
from .simplify import simplify
from .xor_extract import DEFAULT_MAX_ARITY, extract_xors


@dataclass
class SplitConfig:
    cutoff_offset: int = 4
    fallback_cutoff: int = 10
    true_first: bool = True
    max_rule_passes: int = 1
    use_rules: bool = True
    max_xor_arity: int = DEFAULT_MAX_ARITY
    seed: int = 0
    time_limit: Optional[float] = None
    max_conflicts: Optional[int] = None  # per CDCL call
    debug_rules: bool = False

    def __post_init__(self):
        if self.cutoff_offset < 1:
            raise ValueError("cutoff_offset must be >= 1")
        if self.fallback_cutoff < 2:
            raise ValueError("fallback_cutoff must be >= 2")
        if self.max_rule_passes < 1:
            raise ValueError("max_rule_passes must be >= 1")


@dataclass(frozen=True)
class CandidateScore:
    variable: int
    score: int


@dataclass
class SplitStats:
    nodes_visited: int = 0
    decisions: int = 0
    p_size: int = 0
    cutoff_level: int = 0
    subproblems: int = 0
    cdcl_calls: int = 0
    cdcl_call_levels: Counter = field(default_factory=Counter)
    subproblems_simplified: int = 0
    subproblems_refuted_by_simplify: int = 0
    rule_matches_total: int = 0
    rule_matches_by_rule: Counter = field(default_factory=Counter)
    rule_clauses_added: int = 0
    decision_var1_clauses: int = 0
    literals_merged: int = 0
    clauses_subsumed: int = 0
    cdcl: CdclStats = field(default_factory=CdclStats)

    def as_dict(self) -> dict:
        d = {k: getattr(self, k) for k in self.__dataclass_fields__}
        d["cdcl_call_levels"] = {str(k): v for k, v in sorted(self.cdcl_call_levels.items())}
        d["rule_matches_by_rule"] = {
            str(k): v for k, v in sorted(self.rule_matches_by_rule.items())
        }
        d["cdcl"] = self.cdcl.as_dict()
        return d

    @property
    def fraction_simplified(self) -> Optional[float]:
        if not self.subproblems:
            return None
        return self.subproblems_simplified / self.subproblems


@dataclass
class SolveResult:
    status: str  # "SAT", "UNSAT" or "UNKNOWN"
    model: Optional[Model] = None
    stats: SplitStats = field(default_factory=SplitStats)


def occurrence_counts(formula: CnfFormula) -> Counter:
    return Counter(l for c in formula.clauses for l in c)


def decision_var1(formula: CnfFormula, add_clauses: bool = True) -> tuple[list[int], CnfFormula]:
    """Rule-1 ``C`` variables in match order, plus the formula with (-C | D) added."""
    P: list[int] = []
    out = formula.copy()
    present = set(out.clauses)
    for m in match_rules(formula, rules=(1,)):
        A, B, C, D = m.lits
        if var(C) not in P:
            P.append(var(C))
        if add_clauses:
            c = tuple(sorted({-C, D}, key=abs))
            if c not in present:
                present.add(c)
                out.add_clause(c)
    return P, out


def decision_var2(formula: CnfFormula) -> list[CandidateScore]:
    """Scored A, B, D variables of the rule-1 premises, best first."""
    pool: set[int] = set()
    for m in match_rules(formula, rules=(1,)):
        A, B, _, D = m.lits
        pool.update((var(A), var(B), var(D)))
    return score(formula, pool)


def score(formula: CnfFormula, variables) -> list[CandidateScore]:
    occ = occurrence_counts(formula)
    out = [CandidateScore(v, occ[v] * occ[-v]) for v in variables]
    out.sort(key=lambda c: (-c.score, c.variable))
    return out


class _Search:
    def __init__(self, original: CnfFormula, config: SplitConfig):
        self.original = original
        self.cfg = config
        self.stats = SplitStats()
        self.n = original.num_vars
        self.deadline = (
            None if config.time_limit is None else time.monotonic() + config.time_limit
        )

    def _check_time(self) -> None:
        if self.deadline is not None and time.monotonic() > self.deadline:
            raise BudgetExhausted("time limit")

    def run(self) -> SolveResult:
        st = self.stats
        a = Assignment(self.n)
        if not propagate(self.original, a).ok:
            st.nodes_visited = 1
            return SolveResult("UNSAT", stats=st)
        f = residual(self.original, a)
        path = {var(l): l > 0 for l in a.trail}
        P, f_aug = decision_var1(f, add_clauses=self.cfg.use_rules)
        if self.cfg.use_rules:
            st.decision_var1_clauses = len(f_aug.clauses) - len(f.clauses)
            f = f_aug
        self.P = P
        st.p_size = len(P)
        self.cutoff = len(P) + self.cfg.cutoff_offset if P else self.cfg.fallback_cutoff
        st.cutoff_level = self.cutoff
        model = self._node(f, 1, None, path)
        if model is None:
            return SolveResult("UNSAT", stats=st)
        full = {v: model.get(v, False) for v in range(1, self.n + 1)}
        if not evaluate(self.original, full):
            raise AssertionError("reconstructed model does not satisfy the input formula")
        return SolveResult("SAT", full, st)

    def _pick(self, f: CnfFormula, level: int, Q: Optional[list[int]]):
        free = f.variables()
        if level < len(self.P):
            for v in self.P:
                if v in free:
                    return v, Q
        if Q is None:
            Q = [c.variable for c in decision_var2(f)]
        cands = score(f, [v for v in Q if v in free])
        if cands:
            return cands[0].variable, Q
        return score(f, free)[0].variable, Q

    def _node(self, f: CnfFormula, level: int, Q, path: dict) -> Optional[Model]:
        st = self.stats
        st.nodes_visited += 1
        self._check_time()
        if f.is_empty():
            return dict(path)
        if level >= self.cutoff:
            return self._leaf(f, level, path)
        v, Q = self._pick(f, level, Q)
        st.decisions += 1
        for value in ((True, False) if self.cfg.true_first else (False, True)):
            a = Assignment(self.n)
            a.decide(v if value else -v)
            if not propagate(f, a).ok:
                continue
            child_path = dict(path)
            child_path.update((var(l), l > 0) for l in a.trail)
            m = self._node(residual(f, a), level + 1, Q, child_path)
            if m is not None:
                return m
        return None

    def _leaf(self, f: CnfFormula, level: int, path: dict) -> Optional[Model]:
        st, cfg = self.stats, self.cfg
        st.subproblems += 1
        out = simplify(f)
        st.literals_merged += out.literals_merged
        st.clauses_subsumed += out.clauses_subsumed
        if out.status == "proven_unsat":
            st.subproblems_refuted_by_simplify += 1
            return None
        g = out.formula
        if cfg.use_rules:
            added = 0
            for _ in range(cfg.max_rule_passes):
                g, _ = extract_xors(g, cfg.max_xor_arity)
                matches, _, G = derive(g)
                if cfg.debug_rules:
                    for m in matches:
                        if not verify_match(m, g):
                            raise AssertionError(f"unsound rule match {m.dump()}")
                present = set(g.clauses)
                new = [c for c in G if c not in present]
                st.rule_matches_total += len(matches)
                st.rule_matches_by_rule.update(m.rule for m in matches)
                if not new:
                    break
                added += len(new)
                g = CnfFormula(g.num_vars, g.clauses + new, g.xors)
            if added:
                st.subproblems_simplified += 1
                st.rule_clauses_added += added
        st.cdcl_calls += 1
        st.cdcl_call_levels[level] += 1
        remaining = None
        if self.deadline is not None:
            remaining = max(0.0, self.deadline - time.monotonic())
        res = cdcl_solve(
            expand_xors(g).clauses,
            self.n,
            max_conflicts=cfg.max_conflicts,
            time_limit=remaining,
            seed=cfg.seed,
        )
        st.cdcl.merge(res.stats)
        if res.status == "UNKNOWN":
            raise BudgetExhausted("CDCL budget")
        if res.status == "UNSAT":
            return None
        model = out.substitution.extend_model(res.model)
        model.update(path)
        return model


def solve_split(formula: CnfFormula, config: Optional[SplitConfig] = None) -> SolveResult:
    """Split, simplify, strengthen and solve; ``formula`` should already carry its XORs."""
    search = _Search(formula, config or SplitConfig())
    try:
        return search.run()
    except BudgetExhausted:
        return SolveResult("UNKNOWN", stats=search.stats)


def solve_formula(
    formula: CnfFormula, config: Optional[SplitConfig] = None, split: bool = True
) -> SolveResult:
    """Whole pipeline: XOR extraction, then the splitter or plain CDCL."""
    config = config or SplitConfig()
    g, _ = extract_xors(formula, config.max_xor_arity)
    if split:
        res = solve_split(g, config)
    else:
        st = SplitStats()
        r = cdcl_solve(
            expand_xors(g).clauses,
            g.num_vars,
            max_conflicts=config.max_conflicts,
            time_limit=config.time_limit,
            seed=config.seed,
        )
        st.cdcl = r.stats
        st.cdcl_calls = 1
        res = SolveResult(r.status, r.model, st)
    if res.status == "SAT" and not evaluate(formula, res.model):
        raise AssertionError("model does not satisfy the input formula")
    return res
