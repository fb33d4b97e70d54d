from __future__ import annotations

import itertools

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from gvforge.linalg import (
    DimensionMismatch,
    Matrix,
    NotInvertible,
    PrimeField,
    cokernel,
    invert,
    kernel_basis,
    kronecker,
    rank,
    solve,
    try_invert,
)

PRIMES = [2, 3, 5, 7]


def span_size(A: Matrix) -> int:
    """Brute-force oracle: number of distinct vectors A·c over all coefficient vectors c."""
    p = A.p
    seen = set()
    for c in itertools.product(range(p), repeat=A.cols):
        v = (A.a @ np.array(c, dtype=np.int64)) % p if A.cols else np.zeros(A.rows, dtype=np.int64)
        seen.add(tuple(int(x) for x in v))
    return len(seen)


def brute_kernel_size(A: Matrix) -> int:
    p = A.p
    return sum(
        1 for c in itertools.product(range(p), repeat=A.cols)
        if not ((A.a @ np.array(c, dtype=np.int64)) % p).any()
    )


@st.composite
def matrices(draw, p=None, rows=None, cols=None, max_side=4):
    p = draw(st.sampled_from(PRIMES)) if p is None else p
    r = draw(st.integers(0, max_side)) if rows is None else rows
    c = draw(st.integers(0, max_side)) if cols is None else cols
    vals = draw(st.lists(st.integers(0, p - 1), min_size=r * c, max_size=r * c))
    return Matrix(np.array(vals, dtype=np.int64).reshape(r, c), p)


@st.composite
def square(draw, max_side=4):
    p = draw(st.sampled_from(PRIMES))
    n = draw(st.integers(1, max_side))
    return draw(matrices(p=p, rows=n, cols=n))


def test_prime_field_rejects_composites():
    with pytest.raises(ValueError):
        PrimeField(4)
    assert PrimeField(7).inv(3) == 5


def test_entries_are_reduced():
    A = Matrix([[5, -1], [7, 2]], 3)
    assert A.tolist() == [[2, 2], [1, 2]]


def test_field_mismatch_is_an_error():
    with pytest.raises(DimensionMismatch):
        Matrix.identity(2, 2) @ Matrix.identity(2, 3)


def test_shape_mismatch_is_an_error():
    with pytest.raises(DimensionMismatch):
        Matrix.zeros(2, 3, 2) @ Matrix.zeros(2, 3, 2)


@pytest.mark.parametrize("p,n", [(2, 2), (3, 2), (2, 3)])
def test_invertible_count_matches_determinant_oracle(p, n):
    # oracle: a matrix is invertible iff its columns span the whole space
    count = 0
    expected = 0
    for vals in itertools.product(range(p), repeat=n * n):
        A = Matrix(np.array(vals).reshape(n, n), p)
        count += try_invert(A) is not None
        expected += span_size(A) == p ** n
    assert count == expected
    gl = 1
    for k in range(n):
        gl *= p ** n - p ** k
    assert count == gl


@settings(max_examples=150, deadline=None)
@given(matrices(max_side=3))
def test_rank_agrees_with_span_enumeration(A):
    if A.p ** A.cols > 4000:
        return
    assert A.p ** rank(A) == span_size(A)


@settings(max_examples=150, deadline=None)
@given(matrices(max_side=3))
def test_kernel_basis(A):
    K = kernel_basis(A)
    assert K.rows == A.cols
    assert K.cols == A.cols - rank(A)
    assert (A @ K).is_zero()
    if A.p ** A.cols <= 4000:
        assert A.p ** K.cols == brute_kernel_size(A)


@settings(max_examples=150, deadline=None)
@given(square())
def test_inverse_is_two_sided(A):
    inv = try_invert(A)
    if inv is None:
        assert rank(A) < A.rows
        with pytest.raises(NotInvertible):
            invert(A)
    else:
        assert (inv @ A).is_identity() and (A @ inv).is_identity()


@settings(max_examples=100, deadline=None)
@given(st.data())
def test_product_is_associative(data):
    p = data.draw(st.sampled_from(PRIMES))
    a, b, c, d = (data.draw(st.integers(0, 3)) for _ in range(4))
    A = data.draw(matrices(p=p, rows=a, cols=b))
    B = data.draw(matrices(p=p, rows=b, cols=c))
    Cm = data.draw(matrices(p=p, rows=c, cols=d))
    assert (A @ B) @ Cm == A @ (B @ Cm)


@settings(max_examples=100, deadline=None)
@given(st.data())
def test_kronecker_mixed_product(data):
    p = data.draw(st.sampled_from(PRIMES))
    n = [data.draw(st.integers(1, 3)) for _ in range(6)]
    A = data.draw(matrices(p=p, rows=n[0], cols=n[1]))
    B = data.draw(matrices(p=p, rows=n[2], cols=n[3]))
    Cm = data.draw(matrices(p=p, rows=n[1], cols=n[4]))
    D = data.draw(matrices(p=p, rows=n[3], cols=n[5]))
    assert kronecker(A, B) @ kronecker(Cm, D) == kronecker(A @ Cm, B @ D)


def test_kronecker_is_left_major():
    A = Matrix([[1, 2]], 5)
    B = Matrix([[1], [3]], 5)
    assert kronecker(A, B).tolist() == [[1, 2], [3, 1]]


@settings(max_examples=150, deadline=None)
@given(st.data())
def test_solve(data):
    p = data.draw(st.sampled_from(PRIMES))
    r, c, k = (data.draw(st.integers(1, 3)) for _ in range(3))
    A = data.draw(matrices(p=p, rows=r, cols=c))
    X0 = data.draw(matrices(p=p, rows=c, cols=k))
    X = solve(A, A @ X0)
    assert X is not None and A @ X == A @ X0


def test_solve_reports_inconsistency():
    assert solve(Matrix([[1], [1]], 2), Matrix([[1], [0]], 2)) is None


@settings(max_examples=150, deadline=None)
@given(matrices(max_side=4))
def test_cokernel(A):
    Q = cokernel(A)
    assert Q.dim == A.rows - rank(A)
    assert (Q.proj @ A).is_zero()
    assert (Q.proj @ Q.section).is_identity()


def test_large_prime_arithmetic_is_exact():
    p = 2_147_483_647
    A = Matrix([[p - 1, p - 2], [3, p - 5]], p)
    inv = invert(A)
    assert (inv @ A).is_identity()
