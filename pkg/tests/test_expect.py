from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from btableau import expect
from btableau.enumeration import StatAccumulator, enumerate_all, u_moment_brute
from btableau.errors import DomainError, IndexOutOfRange, ResourceCap

F = Fraction


@pytest.fixture(scope="module")
def brute():
    out = {}
    for n in range(1, 8):
        acc = StatAccumulator(n)
        enumerate_all(n, acc)
        out[n] = acc
    return out


def test_closed_form_examples():
    assert expect.expected_rows(1) == F(1, 2)
    assert expect.expected_rows(2) == F(3, 4)
    assert expect.expected_rows(3) == 1
    assert expect.expected_unrestricted(1) == 1
    assert expect.expected_unrestricted(2) == F(3, 2)
    assert expect.expected_unrestricted(4) == F(25, 12)
    assert expect.expected_diag_ones(0) == 0
    assert expect.expected_diag_ones(2) == 1
    assert expect.expected_diag_ones(5) == F(5, 2)
    assert expect.expected_ss(2) == F(1, 8)
    assert expect.expected_ww(2) == F(3, 8)


def test_positional_examples():
    assert expect.p_south(2, 1) == F(1, 2)
    assert expect.p_south(2, 2) == F(1, 4)
    assert all(expect.p_south(n, 1) == F(1, 2) for n in range(1, 30))
    assert expect.p_ss(2, 2) == F(1, 8)
    assert expect.p_ww(2, 2) == F(3, 8)
    assert sum(expect.p_ss(5, k) for k in range(2, 6)) == expect.expected_ss(5) == F(3, 8)


@pytest.mark.parametrize(
    "fn, bad",
    [
        (expect.expected_rows, 0),
        (expect.expected_unrestricted, 0),
        (expect.expected_ss, 1),
        (expect.expected_ww, 1),
    ],
)
def test_domains(fn, bad):
    with pytest.raises(DomainError):
        fn(bad)


def test_position_ranges():
    with pytest.raises(IndexOutOfRange):
        expect.p_south(3, 0)
    with pytest.raises(IndexOutOfRange):
        expect.p_ss(3, 1)
    with pytest.raises(IndexOutOfRange):
        expect.p_ww(3, 4)


@pytest.mark.parametrize("n", range(1, 8))
def test_aggregates_equal_brute(brute, n):
    acc = brute[n]
    assert acc.mean("rows") == expect.expected_rows(n)
    assert acc.mean("unrestricted") == expect.expected_unrestricted(n)
    assert acc.mean("diagonal_ones") == expect.expected_diag_ones(n)
    if n >= 2:
        assert acc.mean("ss_pairs") == expect.expected_ss(n)
        assert acc.mean("ww_pairs") == expect.expected_ww(n)
        corners = acc.mean("sw_pairs") + acc.mean("ws_pairs")
        assert corners == (n - 1) - expect.expected_ss(n) - expect.expected_ww(n)


@pytest.mark.parametrize("n", range(1, 7))
def test_positional_equal_brute(brute, n):
    acc = brute[n]
    c = acc.count
    for k in range(1, n + 1):
        assert F(acc.south[k], c) == expect.p_south(n, k)
        assert F(c - acc.south[k], c) == 1 - expect.p_south(n, k)
        assert F(acc.g1[k], c) == expect.p_g1(n, k)
        if k >= 2:
            assert F(acc.ss[k], c) == expect.p_ss(n, k)
            assert F(acc.ww[k], c) == expect.p_ww(n, k)


def test_pair_sum_at_seven(brute):
    acc = brute[7]
    total = expect.expected_ss(7) + expect.expected_ww(7) + acc.mean("sw_pairs") + acc.mean("ws_pairs")
    assert total == 6


def test_proof_variant_of_south_probability_disagrees(brute):
    for n in range(1, 7):
        for k in range(1, n + 1):
            assert expect.p_south_proof_form(n, k) != F(brute[n].south[k], brute[n].count)


@pytest.mark.parametrize("n", [1, 2, 3, 10, 57, 200])
def test_formula_table_sums(n):
    table = expect.FormulaTable.build(n)
    assert all(table.sum_checks().values())
    assert len(table.sum_checks()) == (4 if n >= 2 else 2)


def test_formula_table_records():
    recs = expect.FormulaTable.build(2).records()
    row = next(r for r in recs if r["statistic"] == "ww_pairs")
    assert (row["numerator"], row["denominator"]) == (3, 8)


def test_u_moment_examples():
    assert all(expect.u_moment(m, 1) == 1 for m in range(1, 10))
    assert expect.u_moment(1, F(7, 3)) == F(7, 3)
    assert expect.u_moment(2, 2) == 3


@pytest.mark.parametrize("m", range(1, 7))
def test_u_moment_against_brute(m):
    for a in range(1, 6):
        b = u_moment_brute(m, a)
        assert expect.u_moment(m, a) == b
        assert expect.u_moment_gamma_form(m, a) != b


@pytest.mark.parametrize(
    "m, a, value",
    [(1, 5, F(5, 2)), (3, 2, F(9, 4)), (5, 1, F(1, 2))],
)
def test_binomial_identity_examples(m, a, value):
    chk = expect.binomial_identity_check(m, a)
    assert chk.lhs == chk.rhs == value


def test_binomial_identity_cap():
    with pytest.raises(ResourceCap):
        expect.binomial_identity_check(21, 2)


@given(
    st.integers(1, 9),
    st.fractions(min_value=F(1, 10), max_value=10, max_denominator=20),
)
def test_binomial_identity_property(m, a):
    assert expect.binomial_identity_check(m, a).ok


@given(st.integers(2, 400))
def test_pair_probabilities_are_probabilities(n):
    for k in (2, n // 2 + 1, n):
        for p in (expect.p_ss(n, k), expect.p_ww(n, k)):
            assert 0 <= p <= 1
