import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from lgd.modarith import (
    BadModulus,
    DimensionMismatch,
    NonUnit,
    NotContained,
    Residue,
    RowSpan,
    howell_form,
    kernel,
    quotient_basis,
    quotient_invariants,
    solve_linear,
    unit_inverse,
)
from oracles import invariants_by_counting, np_howell, span_size

MODULI = [(3, 1), (3, 2), (5, 1), (5, 2), (7, 2), (3, 3)]


def test_unit_inverse_examples():
    assert unit_inverse(Residue(4, 25)) == Residue(19, 25)
    assert unit_inverse(Residue(1, 9)) == Residue(1, 9)
    with pytest.raises(NonUnit):
        unit_inverse(Residue(5, 25))


def test_residue_rejects_bad_moduli():
    for m in (2, 4, 12, 15, 1):
        with pytest.raises(BadModulus):
            Residue(1, m)


def test_solve_identity():
    sol = solve_linear([[1, 0], [0, 1]], [5, 7], 9)
    assert sol.particular == (5, 7)
    assert sol.kernel.is_zero()


def test_solve_diag3():
    sol = solve_linear([[3, 0], [0, 3]], [3, 6], 9)
    x, y = sol.particular
    assert (3 * x) % 9 == 3 and (3 * y) % 9 == 6
    assert sol.kernel == RowSpan.span([[3, 0], [0, 3]], 9, 2)
    assert sol.kernel.size() == 9


def test_solve_no_solution():
    assert solve_linear([[3, 0], [0, 3]], [1, 0], 9) is None


def test_solve_dimension_mismatch():
    with pytest.raises(DimensionMismatch):
        solve_linear([[1, 0]], [1, 2], 9)
    with pytest.raises(DimensionMismatch):
        solve_linear([[Residue(1, 9), Residue(1, 27)]], [0], None)


def test_quotient_examples():
    full = RowSpan.full(9, 2)
    assert quotient_invariants(full, RowSpan.span([[3, 0]], 9, 2)) == [9, 3]
    assert quotient_invariants(full, full) == []
    assert quotient_invariants(full, RowSpan.zero(9, 2)) == [9, 9]


def test_quotient_not_contained():
    with pytest.raises(NotContained):
        quotient_invariants(RowSpan.span([[3, 0]], 9, 2), RowSpan.span([[1, 0]], 9, 2))


def test_quotient_representatives_have_stated_orders():
    sup = RowSpan.full(27, 3)
    sub = RowSpan.span([[9, 0, 0], [0, 3, 3]], 27, 3)
    basis = quotient_basis(sup, sub)
    assert [o for o, _ in basis] == [27, 9, 3]
    for order, vec in basis:
        assert not sub.contains([x * (order // 3) for x in vec])
        assert sub.contains([x * order for x in vec])


# -------------------------------------------------------------- properties


@st.composite
def systems(draw):
    p, n = draw(st.sampled_from(MODULI))
    m = p**n
    r = draw(st.integers(1, 4))
    c = draw(st.integers(1, 4))
    A = draw(st.lists(st.lists(st.integers(0, m - 1), min_size=c, max_size=c), min_size=r, max_size=r))
    x = draw(st.lists(st.integers(0, m - 1), min_size=c, max_size=c))
    noise = draw(st.lists(st.integers(0, m - 1), min_size=r, max_size=r))
    return p, n, A, x, noise


@settings(max_examples=150, deadline=None)
@given(systems())
def test_solutions_verified_by_substitution(data):
    p, n, A, x, noise = data
    m = p**n
    b = [sum(a * t for a, t in zip(row, x)) % m for row in A]
    sol = solve_linear(A, b, m)
    assert sol is not None
    for row, rhs in zip(A, b):
        assert sum(a * t for a, t in zip(row, sol.particular)) % m == rhs
    for k in sol.kernel.rows:
        assert all(sum(a * t for a, t in zip(row, k)) % m == 0 for row in A)
    # kernel size agrees with |ker| = m^c / |image|
    At = np.array(A, dtype=np.int64).T
    assert sol.kernel.size() * span_size(At, p, n) == m ** len(x)
    # a random right-hand side is solvable exactly when it lies in the column span
    col_span = RowSpan.span([list(col) for col in zip(*A)], m, len(A))
    assert (solve_linear(A, noise, m) is not None) == col_span.contains(noise)


@st.composite
def spans(draw):
    p, n = draw(st.sampled_from(MODULI))
    m = p**n
    c = draw(st.integers(1, 4))
    rows = draw(st.lists(st.lists(st.integers(0, m - 1), min_size=c, max_size=c), max_size=5))
    extra = draw(st.lists(st.lists(st.integers(0, m - 1), min_size=c, max_size=c), max_size=3))
    return p, n, c, rows, extra


@settings(max_examples=150, deadline=None)
@given(spans())
def test_howell_canonical_and_idempotent(data):
    p, n, c, rows, _ = data
    m = p**n
    H = howell_form(rows, m, c)
    assert howell_form(H, m, c) == H
    ref = np_howell(np.array(rows, dtype=np.int64).reshape(len(rows), c), p, n)
    assert H == tuple(tuple(int(x) for x in row) for row in ref)
    # permuting the generators does not change the canonical rows
    assert howell_form(list(reversed(rows)), m, c) == H


@settings(max_examples=150, deadline=None)
@given(spans())
def test_quotient_product_and_counting_oracle(data):
    p, n, c, rows, extra = data
    m = p**n
    sub = RowSpan.span(rows, m, c)
    sup = sub + RowSpan.span(extra, m, c)
    assert sub <= sup
    divs = quotient_invariants(sup, RowSpan.zero(m, c))
    assert int(np.prod(divs, dtype=object)) == sup.size()
    got = quotient_invariants(sup, sub)
    assert int(np.prod(got, dtype=object)) == sup.size() // sub.size()
    top = np.array(sup.rows, dtype=np.int64).reshape(len(sup.rows), c)
    bot = np.array(sub.rows or [[0] * c], dtype=np.int64)
    assert got == invariants_by_counting(top, bot, p, n)


@given(st.sampled_from(MODULI), st.integers(0, 10**6))
def test_inverse_involution(mod, k):
    p, n = mod
    m = p**n
    a = Residue(k % m, m)
    if k % p == 0:
        with pytest.raises(NonUnit):
            unit_inverse(a)
        return
    assert unit_inverse(unit_inverse(a)) == a
    assert (a * unit_inverse(a)).value == 1


def test_kernel_of_zero_matrix_is_everything():
    assert kernel([[0, 0, 0]], 25).size() == 25**3
