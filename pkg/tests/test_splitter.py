import random

import pytest

from logicsat.cdcl import cdcl_solve
from logicsat.cnf import CnfFormula, evaluate
from logicsat.dimacs import expand_xors
from logicsat.hwb import build_miter
from logicsat.oracle import brute_force_sat
from logicsat.rules import RuleMatch, derive
from logicsat.splitter import (
    CandidateScore, SplitConfig, decision_var1, decision_var2, score, solve_formula, solve_split,
)
from logicsat.xor_extract import extract_xors

from helpers import plant, planted_formula, random_kcnf


def rule1_formula():
    f = CnfFormula()
    f.add_xor([1, 2, 3], 1)
    f.add_clause([1, 4])
    f.add_clause([-2, 4])
    return f


def test_decision_var1_example():
    f = rule1_formula()
    P, g = decision_var1(f)
    assert P == [3]
    assert set(g.clauses) == set(f.clauses) | {(-3, 4)}
    assert len(f.clauses) == 2  # input untouched


def test_decision_var1_without_patterns():
    f = random_kcnf(0, 6, 5, k=3)
    P, g = decision_var1(f)
    assert P == [] and g.clauses == f.clauses


def test_decision_var1_two_disjoint_instances():
    f = CnfFormula(8)
    plant(f, RuleMatch(1, (1, 2, 3, 4)), expand=False)
    plant(f, RuleMatch(1, (5, 6, 7, 8)), expand=False)
    P, g = decision_var1(f)
    assert sorted(P) == [3, 7]
    added = [c for c in g.clauses if c not in f.clauses]
    assert set(added) == {(-3, 4), (-7, 8)}
    for c in added:
        assert not brute_force_sat(CnfFormula(8, f.clauses + [(-l,) for l in c], f.xors)).sat


def test_decision_var2_example():
    assert decision_var2(rule1_formula()) == [
        CandidateScore(1, 0), CandidateScore(2, 0), CandidateScore(4, 0),
    ]


def test_score_counts_clauses_only():
    f = CnfFormula(3, [(1, 2), (-1, 2), (-1, 3)])
    f.add_xor([1, 2], 1)
    assert score(f, [1, 2, 3]) == [CandidateScore(1, 2), CandidateScore(2, 0), CandidateScore(3, 0)]


def test_score_is_monotone_in_added_clauses():
    r = random.Random(5)
    f = random_kcnf(5, 8, 20)
    before = {c.variable: c.score for c in score(f, range(1, 9))}
    for _ in range(10):
        f.add_clause(r.sample([v * r.choice((1, -1)) for v in range(1, 9)], 3))
        now = {c.variable: c.score for c in score(f, range(1, 9))}
        assert all(now[v] >= before[v] for v in before)
        before = now


def test_config_validation():
    with pytest.raises(ValueError):
        SplitConfig(cutoff_offset=0)
    with pytest.raises(ValueError):
        SplitConfig(fallback_cutoff=1)


def test_empty_formula_is_sat():
    r = solve_split(CnfFormula())
    assert r.status == "SAT" and r.stats.cdcl_calls == 0


def test_sat_instance_with_rule1_pattern():
    f = CnfFormula(10)
    plant(f, RuleMatch(1, (1, 2, 3, 4)), expand=True)
    r = random.Random(1)
    while len(f.clauses) < 20:
        f.add_clause(r.sample([v * r.choice((1, -1)) for v in range(5, 11)], 3))
    assert brute_force_sat(f).sat
    res = solve_formula(f)
    assert res.status == "SAT" and evaluate(f, res.model)
    assert res.stats.p_size == 1


def test_miter_n8_unsat():
    res = solve_formula(build_miter(8))
    assert res.status == "UNSAT"
    st = res.stats
    assert st.cdcl_calls > 0 and st.cdcl_calls <= st.nodes_visited
    assert set(st.cdcl_call_levels) == {st.cutoff_level}
    assert st.cutoff_level == st.p_size + 4


def _suite(seed):
    if seed % 2:
        return random_kcnf(seed, 18, 76)
    return planted_formula(seed, n=random.Random(seed).randint(8, 20), patterns=3)


@pytest.mark.parametrize("seed", range(500))
def test_agrees_with_oracle(seed):
    f = _suite(seed)
    expected = brute_force_sat(f).status
    res = solve_formula(f)
    assert res.status == expected
    if expected == "SAT":
        assert evaluate(f, res.model)


@pytest.mark.parametrize("seed", range(100))
def test_rules_off_differential(seed):
    f = _suite(seed)
    on = solve_formula(f)
    off = solve_formula(f, SplitConfig(use_rules=False))
    assert on.status == off.status
    assert off.stats.rule_clauses_added == 0 and off.stats.decision_var1_clauses == 0


@pytest.mark.parametrize("seed", range(60))
def test_cnf_g_is_entailed(seed):
    f, _ = extract_xors(planted_formula(seed, n=12, patterns=3, expand=True))
    _, _, G = derive(f)
    for c in G:
        g = CnfFormula(f.num_vars, f.clauses + [(-l,) for l in c], f.xors)
        assert not brute_force_sat(g).sat


def test_leaves_sit_at_cutoff_and_debug_rules_hold():
    for seed in range(40):
        f, _ = extract_xors(planted_formula(seed, n=16, patterns=4))
        res = solve_split(f, SplitConfig(debug_rules=True))
        st = res.stats
        assert st.cdcl_calls <= st.nodes_visited
        assert all(level == st.cutoff_level for level in st.cdcl_call_levels)
        if st.p_size == 0:
            assert st.cutoff_level == 10


def test_cdcl_called_when_not_decided_by_propagation():
    f = random_kcnf(3, 30, 128)
    res = solve_split(f, SplitConfig(fallback_cutoff=3))
    assert res.stats.cdcl_calls > 0


def test_budget_gives_unknown():
    res = solve_formula(build_miter(10), SplitConfig(max_conflicts=1, cutoff_offset=1))
    assert res.status == "UNKNOWN"
    res = solve_formula(build_miter(10), SplitConfig(time_limit=0.0))
    assert res.status == "UNKNOWN"


def test_unsplit_mode_matches_cdcl():
    for seed in range(30):
        f = random_kcnf(seed, 18, 76)
        a = solve_formula(f, split=False)
        b = cdcl_solve(expand_xors(f).clauses, f.num_vars)
        assert a.status == b.status


def test_false_first_order_same_verdicts():
    for seed in range(40):
        f = _suite(seed)
        assert solve_formula(f, SplitConfig(true_first=False)).status == brute_force_sat(f).status
