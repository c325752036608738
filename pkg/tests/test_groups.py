"""Finite group tables, metrics, and constructors."""

from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from skewlab import FiniteGroup, ValidationError, cyclic, from_tables, trivial


def test_trivial_group():
    g = trivial()
    assert g.order == 1
    assert g.identity == 0
    assert g.mul[0][0] == 0
    assert g.inv[0] == 0
    assert g.metric[0][0] == 0


def test_cyclic_tables():
    g = cyclic(4)
    assert g.order == 4
    assert g.mul[1][3] == 0
    assert g.inv[3] == 1
    assert g.identity == 0
    assert g.product([1, 1, 1]) == 3


def test_cyclic_circle_metric_frozen():
    # distances on Z/4: half-turn is the diameter, normalized to 1
    g = cyclic(4)
    assert g.metric[0][1] == Fraction(1, 2)
    assert g.metric[0][2] == Fraction(1)
    assert g.metric[1][3] == Fraction(1)
    assert g.metric[2][3] == Fraction(1, 2)


def test_cyclic_odd_metric():
    g = cyclic(5)
    assert g.metric[0][1] == g.metric[0][4]
    assert max(max(row) for row in g.metric) == 1


@given(st.integers(min_value=1, max_value=12))
def test_cyclic_group_axioms(m):
    g = cyclic(m)
    e = g.identity
    for a in g.elements():
        assert g.mul[a][g.inv[a]] == e
        assert g.mul[e][a] == a
        for b in g.elements():
            for c in g.elements():
                assert g.mul[g.mul[a][b]][c] == g.mul[a][g.mul[b][c]]


@given(st.integers(min_value=2, max_value=10))
def test_cyclic_metric_axioms(m):
    g = cyclic(m)
    for a in g.elements():
        assert g.metric[a][a] == 0
        for b in g.elements():
            assert g.metric[a][b] == g.metric[b][a]
            if a != b:
                assert g.metric[a][b] > 0
            for c in g.elements():
                assert g.metric[a][c] <= g.metric[a][b] + g.metric[b][c]


@given(st.integers(min_value=2, max_value=10))
def test_cyclic_metric_bi_invariant(m):
    g = cyclic(m)
    for a in g.elements():
        for b in g.elements():
            for h in g.elements():
                assert g.metric[g.mul[a][h]][g.mul[b][h]] == g.metric[a][b]
                assert g.metric[g.mul[h][a]][g.mul[h][b]] == g.metric[a][b]


def test_element_order():
    g = cyclic(6)
    assert g.element_order(0) == 1
    assert g.element_order(1) == 6
    assert g.element_order(2) == 3
    assert g.element_order(3) == 2


def test_haar_uniform():
    g = cyclic(3)
    h = g.haar()
    assert all(w == Fraction(1, 3) for w in h.values())
    assert sum(h.values()) == 1


def test_from_tables_klein():
    # Klein four-group as an explicit table
    mul = (
        (0, 1, 2, 3),
        (1, 0, 3, 2),
        (2, 3, 0, 1),
        (3, 2, 1, 0),
    )
    g = from_tables(mul)
    assert g.identity == 0
    assert all(g.inv[a] == a for a in g.elements())
    assert g.element_order(3) == 2


def test_from_tables_rejects_non_associative():
    mul = (
        (0, 1, 2),
        (1, 2, 0),
        (2, 1, 0),
    )
    with pytest.raises(ValidationError):
        from_tables(mul)


def test_from_tables_rejects_non_latin():
    mul = (
        (0, 1),
        (1, 1),
    )
    with pytest.raises(ValidationError):
        from_tables(mul)


def test_from_tables_custom_metric():
    mul = ((0, 1), (1, 0))
    metric = ((Fraction(0), Fraction(1, 3)), (Fraction(1, 3), Fraction(0)))
    g = from_tables(mul, metric=metric)
    assert g.metric[0][1] == Fraction(1, 3)


def test_cyclic_rejects_bad_order():
    with pytest.raises(ValidationError):
        cyclic(0)
