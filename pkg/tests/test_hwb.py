import random

import pytest

from logicsat.cnf import Assignment, CnfFormula, evaluate, propagate
from logicsat.dimacs import write_dimacs
from logicsat.hwb import (
    VARIANTS, Circuit, build_circuit, build_miter, hwb_reference, miter_comments, tseitin_encode,
)
from logicsat.oracle import brute_force_projected
from logicsat.splitter import SplitConfig, solve_formula

from helpers import dpll


def test_reference_examples():
    assert hwb_reference((1, 0, 1, 0)) is False
    assert hwb_reference((0,) * 5) is False
    assert hwb_reference((1,) * 7) is True
    assert hwb_reference((0, 1, 0)) is False  # sum 1 selects x_1 = 0
    assert hwb_reference((1, 1, 0, 0)) is True


@pytest.mark.parametrize("n", range(1, 17))
def test_reference_matches_definition(n):
    for k in range(1 << n):
        s = bin(k).count("1")
        expected = s > 0 and bool((k >> (s - 1)) & 1)
        assert hwb_reference([(k >> i) & 1 for i in range(n)]) == expected


@pytest.mark.parametrize("variant", VARIANTS)
def test_n4_example(variant):
    assert build_circuit(4, variant).simulate([1, 1, 0, 0]) is True


@pytest.mark.parametrize("variant", VARIANTS)
@pytest.mark.parametrize("n", range(1, 11))
def test_variants_exhaustive(variant, n):
    build_circuit(n, variant, self_check=True)


def test_variants_bitwise_identical_at_10():
    a, b = (build_circuit(10, v) for v in VARIANTS)
    for k in range(1 << 10):
        bits = [bool((k >> i) & 1) for i in range(10)]
        assert a.simulate(bits) == b.simulate(bits)


def test_circuits_are_topological():
    for v in VARIANTS:
        c = build_circuit(9, v)
        for out, _, ins in c.gates:
            assert all(i < out for i in ins)


def test_unknown_variant():
    with pytest.raises(ValueError):
        build_circuit(4, "bdd")


def test_tseitin_and_gate():
    c = Circuit(2)
    c.output = c.AND(2, 3)
    clauses, out, _ = tseitin_encode(c, 1)
    assert out == 3
    assert sorted(map(sorted, clauses)) == sorted(map(sorted, [(-3, 1), (-3, 2), (-1, -2, 3)]))


@pytest.mark.parametrize(
    "kind, count", [("NOT", 2), ("AND", 3), ("OR", 3), ("XOR", 4), ("MUX", 4)],
)
def test_tseitin_gate_sizes(kind, count):
    c = Circuit(3)
    ins = {"NOT": (2,), "MUX": (2, 3, 4)}.get(kind, (2, 3))
    c.output = getattr(c, kind)(*ins)
    clauses, out, _ = tseitin_encode(c, 1)
    assert len(clauses) == count
    for k in range(8):
        bits = [bool((k >> i) & 1) for i in range(3)]
        f = CnfFormula(4, clauses + [(i + 1 if b else -(i + 1),) for i, b in enumerate(bits)])
        want = c.simulate(bits)
        assert dpll(CnfFormula(4, f.clauses + [(out if want else -out,)]))
        assert not dpll(CnfFormula(4, f.clauses + [(-out if want else out,)]))


def test_constant_folding():
    c = Circuit(2)
    assert c.AND(2, 0) == 0 and c.OR(2, 1) == 1 and c.XOR(2, 0) == 2 and c.NOT(1) == 0
    assert not c.gates


def test_simulation_matches_encoding():
    r = random.Random(0)
    for trial in range(200):
        n = r.randint(3, 9)
        c = build_circuit(n, VARIANTS[trial % 2])
        clauses, out, _ = tseitin_encode(c, 1)
        bits = [r.random() < 0.5 for _ in range(n)]
        units = [(i + 1 if b else -(i + 1),) for i, b in enumerate(bits)]
        nv = max(abs(l) for cl in clauses for l in cl)
        f = CnfFormula(nv, clauses + units)
        a = Assignment(nv)
        assert propagate(f, a).ok
        assert a.value(out) == c.simulate(bits)
        # the opposite output value is refuted by an independent solver
        flipped = -out if c.simulate(bits) else out
        assert not dpll(CnfFormula(nv, f.clauses + [(flipped,)]))


def test_miter_n4_unsat_by_projected_oracle():
    f = build_miter(4)
    assert f.num_vars > 4
    assert not brute_force_projected(f, range(1, 5)).sat


def test_broken_miter_is_sat():
    f = build_miter(4, negate_second=True)
    v = brute_force_projected(f, range(1, 5))
    assert v.sat and evaluate(f, v.model)
    assert solve_formula(build_miter(8, negate_second=True)).status == "SAT"


def test_miter_is_deterministic():
    assert write_dimacs(build_miter(7), comments=miter_comments(7)) == write_dimacs(
        build_miter(7), comments=miter_comments(7)
    )
    assert "expected: UNSAT" in miter_comments(5)


@pytest.mark.parametrize("n", [8, 9])
def test_miters_have_rule_structure(n):
    res = solve_formula(build_miter(n))
    assert res.status == "UNSAT"
    assert res.stats.rule_matches_total > 0
    off = solve_formula(build_miter(n), SplitConfig(use_rules=False))
    assert off.status == "UNSAT"
