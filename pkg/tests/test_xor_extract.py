
import pytest

from logicsat.cnf import CnfFormula, XorConstraint
from logicsat.oracle import model_set
from logicsat.xor_extract import extract_xors

from helpers import planted_xor_formula


def clauses(*cs):
    f = CnfFormula()
    for c in cs:
        f.add_clause(c)
    return f


def test_ternary_xor_parity_one():
    f = clauses((1, 2, 3), (1, -2, -3), (-1, 2, -3), (-1, -2, 3))
    g, rep = extract_xors(f)
    assert g.xors == [XorConstraint((1, 2, 3), 1)] and not g.clauses
    assert rep.xors_found == {3: 1} and rep.clauses_consumed == 4
    assert model_set(f) == model_set(g)


def test_binary_xor():
    g, _ = extract_xors(clauses((1, 2), (-1, -2)))
    assert g.xors == [XorConstraint((1, 2), 1)]


def test_odd_negations_give_parity_zero():
    g, _ = extract_xors(clauses((-1, 2, 3), (1, -2, 3), (1, 2, -3), (-1, -2, -3)))
    assert g.xors == [XorConstraint((1, 2, 3), 0)]


def test_incomplete_group_is_left_alone():
    f = clauses((1, 2, 3), (1, -2, -3), (-1, 2, -3))
    g, rep = extract_xors(f)
    assert not g.xors and g.clauses == f.clauses and rep.total == 0


def test_extra_clauses_over_same_variables_remain():
    f = clauses((1, 2, 3), (1, -2, -3), (-1, 2, -3), (-1, -2, 3), (-1, -2, -3))
    g, _ = extract_xors(f)
    assert g.clauses == [(-1, -2, -3)]
    assert model_set(f) == model_set(g)


def test_both_parity_classes_give_empty_clause():
    f = clauses((1, 2), (-1, -2), (-1, 2), (1, -2))
    g, _ = extract_xors(f)
    assert () in g.clauses and not g.xors


def test_duplicates_counted_once():
    f = clauses((1, 2), (1, 2), (-1, -2))
    g, _ = extract_xors(f)
    assert g.xors == [XorConstraint((1, 2), 1)] and not g.clauses


def test_max_arity_respected():
    f = CnfFormula()
    from logicsat.dimacs import expand_xor
    for c in expand_xor(XorConstraint((1, 2, 3, 4, 5), 1)):
        f.add_clause(c)
    assert not extract_xors(f, 4)[0].xors
    assert extract_xors(f, 5)[0].xors == [XorConstraint((1, 2, 3, 4, 5), 1)]
    with pytest.raises(ValueError):
        extract_xors(f, 7)


@pytest.mark.parametrize("seed", range(30))
def test_planted_round_trip(seed):
    f, planted = planted_xor_formula(seed)
    g, rep = extract_xors(f)
    found = {x.variables: x.parity for x in g.xors}
    assert found == planted
    assert rep.clauses_consumed == sum(1 << (len(v) - 1) for v in planted)


@pytest.mark.parametrize("seed", range(200))
def test_extraction_is_equivalent(seed):
    f, _ = planted_xor_formula(seed, n=12, n_xors=3, filler=15)
    g, _ = extract_xors(f)
    assert model_set(f) == model_set(g)


@pytest.mark.parametrize("seed", range(20))
def test_idempotent(seed):
    f, _ = planted_xor_formula(seed)
    g, _ = extract_xors(f)
    h, rep = extract_xors(g)
    assert (h.clauses, h.xors) == (g.clauses, g.xors) and rep.total == 0
