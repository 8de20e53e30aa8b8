import math
from fractions import Fraction

import pytest

from btableau.core import realize, serialize, stats
from btableau.enumeration import (
    EMPTY,
    StatAccumulator,
    SumVisitor,
    binomial_histogram,
    brute_expectation,
    child_histogram,
    children,
    enumerate_all,
    iter_tableaux,
    measure_identity_check,
    measure_identity_table,
    per_position_probability,
)
from btableau.errors import IndexOutOfRange, ResourceCap

from conftest import all_tableaux


@pytest.mark.parametrize("n", range(7))
def test_counts(n):
    assert enumerate_all(n) == 2**n * math.factorial(n)


def test_count_examples():
    assert enumerate_all(0) == 1
    assert enumerate_all(2) == 8


def test_cap():
    with pytest.raises(ResourceCap):
        enumerate_all(9)
    with pytest.raises(ResourceCap):
        enumerate_all(4, cap=3)


def test_small_parent_children(small_parent):
    group = children(small_parent)
    assert [serialize(c) for c in group.children] == [
        "WWS;1;01",
        "WWW;1;01;01",
        "WWW;1;01;10",
        "WWW;1;01;11",
    ]
    grids = {tuple(tuple(r.cells) for r in c.grid.rows) for c in group.children[1:]}
    # The three west extensions of the small parent.
    assert grids == {
        ((1,), (0, 0), (1, 1, 1)),
        ((1,), (0, 0), (0, 1, 1)),
        ((0,), (0, 0), (1, 1, 1)),
    }


def test_children_of_empty():
    kids = children(EMPTY).children
    assert [serialize(k) for k in kids] == ["S", "W;1"]


def test_children_u3():
    parent = realize("SSS")
    kids = children(parent).children
    assert len(kids) == 16
    assert sum(k.history[-1] == "S" for k in kids) == 1


@pytest.mark.parametrize("n", range(6))
def test_parent_groups(n):
    for parent in all_tableaux(n):
        u = parent.u_trace[-1] if parent.u_trace else 0
        kids = children(parent).children
        assert len(kids) == 2 ** (u + 1)
        assert sum(k.history[-1] == "S" for k in kids) == 1
        assert len({k.history for k in kids}) == len(kids)
        assert child_histogram(parent) == binomial_histogram(u)
        # Every child must match its structural realization.
        for k in kids:
            assert realize(k.history).u_trace == k.u_trace


def test_histogram_examples(small_parent):
    assert child_histogram(small_parent) == {1: 2, 2: 2}
    assert child_histogram(EMPTY) == {1: 2}
    assert child_histogram(realize("SS")) == {1: 2, 2: 4, 3: 2}


@pytest.mark.parametrize("n", range(6))
def test_enumeration_is_a_bijection(n):
    seen = [serialize(t) for t in iter_tableaux(n)]
    assert len(set(seen)) == len(seen) == 2**n * math.factorial(n)


def test_deterministic_order():
    assert [serialize(t) for t in iter_tableaux(2)] == [
        "SS",
        "SW;01",
        "SW;10",
        "SW;11",
        "WS;1",
        "WW;1;01",
        "WW;1;10",
        "WW;1;11",
    ]


def test_brute_examples():
    assert brute_expectation(2, "rows").mean == Fraction(3, 4)
    assert brute_expectation(2, "unrestricted").mean == Fraction(3, 2)
    rep = brute_expectation(2, "ss_pairs")
    assert (rep.total, rep.count, rep.mean) == (1, 8, Fraction(1, 8))
    assert rep.as_record() == {
        "n": 2, "statistic": "ss_pairs", "numerator": 1, "denominator": 8, "count": 8
    }


def test_per_position_examples():
    assert per_position_probability(2, "S_k", 2) == Fraction(1, 4)
    assert per_position_probability(2, "WW_k", 2) == Fraction(3, 8)
    assert per_position_probability(2, "G1_k", 1) == Fraction(1, 2)
    with pytest.raises(IndexOutOfRange):
        per_position_probability(3, "SS_k", 1)
    with pytest.raises(IndexOutOfRange):
        per_position_probability(3, "S_k", 4)


def test_accumulator_matches_per_position():
    acc = StatAccumulator(4)
    enumerate_all(4, acc)
    for k in range(1, 5):
        assert Fraction(acc.south[k], acc.count) == per_position_probability(4, "S_k", k)
        assert Fraction(acc.g1[k], acc.count) == per_position_probability(4, "G1_k", k)


def test_accumulator_merge_is_order_free():
    parts = [StatAccumulator(3) for _ in range(3)]
    for i, t in enumerate(iter_tableaux(3)):
        parts[i % 3].visit(t)
    a, b = parts[0].spawn(), parts[0].spawn()
    for p in parts:
        a.merge(p)
    for p in reversed(parts):
        b.merge(p)
    whole = StatAccumulator(3)
    enumerate_all(3, whole)
    for acc in (a, b):
        assert acc.totals == whole.totals
        assert acc.south == whole.south and acc.ww == whole.ww


def test_parallel_enumeration_matches_serial():
    serial, par = StatAccumulator(5), StatAccumulator(5)
    assert enumerate_all(5, serial) == enumerate_all(5, par, workers=2)
    assert serial.totals == par.totals
    assert serial.ss == par.ss


def test_sum_visitor_sees_stats():
    v = SumVisitor(lambda t: stats(t).columns)
    enumerate_all(3, v)
    assert Fraction(v.total, v.count) == 3 - Fraction(1)  # columns = n - rows, E rows = 1


@pytest.mark.parametrize(
    "m, a, x, value",
    [(2, 1, "one", Fraction(1)), (2, 2, "one", Fraction(3))],
)
def test_measure_examples(m, a, x, value):
    chk = measure_identity_check(m, a, x)
    assert chk.lhs == chk.rhs == value


def test_measure_identity_small():
    assert measure_identity_check(4, 3, "rows").ok
    for m in range(1, 6):
        for chk in measure_identity_table(m, (1, 2, 3, 4)):
            single = measure_identity_check(m, chk.a, chk.statistic)
            assert (single.lhs, single.rhs) == (chk.lhs, chk.rhs)
            assert chk.ok
