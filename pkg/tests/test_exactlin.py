import numpy as np
import pytest
import scipy.sparse as sp
from hypothesis import given, settings
from hypothesis import strategies as st

from frobkern.exactlin import (
    FpMatrix,
    MalformedInputError,
    DimensionError,
    inverse,
    rank_and_nullspace,
    rref,
    solve,
)


def oracle_rank(rows, p):
    """Textbook elimination on lists of Python ints, written independently of the library."""
    m = [list(r) for r in rows]
    rank = 0
    ncols = len(m[0]) if m else 0
    for c in range(ncols):
        piv = next((i for i in range(rank, len(m)) if m[i][c] % p), None)
        if piv is None:
            continue
        m[rank], m[piv] = m[piv], m[rank]
        inv = pow(m[rank][c], -1, p)
        m[rank] = [x * inv % p for x in m[rank]]
        for i in range(len(m)):
            if i != rank and m[i][c] % p:
                f = m[i][c]
                m[i] = [(a - f * b) % p for a, b in zip(m[i], m[rank])]
        rank += 1
    return rank


def test_rank_nullspace_equal_rows():
    r, N = rank_and_nullspace(FpMatrix.build([[1, 1], [1, 1]], 2))
    assert r == 1
    assert N.dense().T.tolist() == [[1, 1]]


def test_identity_has_empty_nullspace():
    r, N = rank_and_nullspace(FpMatrix.build(np.eye(2, dtype=int), 3))
    assert r == 2 and N.cols == 0


def test_random_6x9_multiply_back():
    rng = np.random.default_rng(5)
    A = FpMatrix.build(rng.integers(0, 5, (6, 9)), 5)
    r, N = rank_and_nullspace(A)
    assert N.cols == 9 - r
    assert not np.any(A.dense() @ N.dense() % 5)
    assert r == oracle_rank(A.dense().tolist(), 5)


def test_unreduced_entries_rejected():
    with pytest.raises(MalformedInputError):
        FpMatrix(3, np.array([[0, 3]]))
    with pytest.raises(MalformedInputError):
        FpMatrix(4, np.array([[0, 1]]))


def test_solve_examples():
    b = np.array([2, 0, 1])
    assert solve(FpMatrix.build(np.eye(3, dtype=int), 3), b).tolist() == [2, 0, 1]
    # pivot-preferred: the free variable is set to zero
    assert solve(FpMatrix.build([[1, 1]], 2), [1]).tolist() == [1, 0]
    assert solve(FpMatrix.build([[0, 0]], 2), [1]) is None
    with pytest.raises(DimensionError):
        solve(FpMatrix.build([[1, 1]], 2), [1, 0])


@pytest.mark.parametrize("p", [2, 3, 5, 7])
def test_rank_nullity_1000_random(p):
    rng = np.random.default_rng(p)
    for _ in range(1000):
        r_, c_ = rng.integers(1, 7, 2)
        a = rng.integers(0, p, (r_, c_))
        if rng.random() < 0.3:      # force some rank deficiency
            a[-1] = a[0] * rng.integers(0, p) % p
        r, N = rank_and_nullspace(FpMatrix.build(a, p))
        assert r + N.cols == c_
        assert not np.any(a @ N.dense() % p)
        assert r == oracle_rank(a.tolist(), p)


@settings(max_examples=60, deadline=None)
@given(st.integers(1, 8), st.integers(1, 8), st.sampled_from([2, 3, 5, 7]), st.integers(0, 10**6))
def test_solve_consistent_rhs(nr, nc, p, seed):
    rng = np.random.default_rng(seed)
    A = FpMatrix.build(rng.integers(0, p, (nr, nc)), p)
    x = rng.integers(0, p, nc)
    b = A.dense() @ x % p
    x2 = solve(A, b)
    assert x2 is not None
    assert np.array_equal(A.dense() @ x2 % p, b)


@settings(max_examples=60, deadline=None)
@given(st.integers(1, 7), st.integers(1, 7), st.sampled_from([2, 3, 5]), st.integers(0, 10**6))
def test_rank_permutation_invariant(nr, nc, p, seed):
    rng = np.random.default_rng(seed)
    a = rng.integers(0, p, (nr, nc))
    r0 = rank_and_nullspace(FpMatrix.build(a, p))[0]
    b = a[rng.permutation(nr)][:, rng.permutation(nc)]
    assert rank_and_nullspace(FpMatrix.build(b, p))[0] == r0


def test_rref_deterministic_and_sparse_path_agrees():
    rng = np.random.default_rng(1)
    a = rng.integers(0, 3, (400, 60)) * (rng.random((400, 60)) < 0.1)
    dense = FpMatrix.build(a, 3)
    sparse = FpMatrix.build(a, 3, threshold=100)
    assert sparse.is_sparse and not dense.is_sparse
    R1, p1 = rref(dense)
    R2, p2 = rref(sparse)
    R3, p3 = rref(FpMatrix.build(a, 3))
    assert p1 == p2 == p3
    assert np.array_equal(R1, R2) and np.array_equal(R1, R3)


def test_sparse_input_matrix():
    a = sp.random(50, 40, density=0.05, random_state=2, data_rvs=lambda k: np.ones(k)).astype(np.int64)
    A = FpMatrix.build(a, 2, threshold=10)
    r, N = rank_and_nullspace(A)
    assert r == oracle_rank(a.toarray().tolist(), 2)
    assert not np.any(a.toarray() @ N.dense() % 2)


def test_inverse():
    a = np.array([[1, 2], [3, 4]])
    inv = inverse(a, 5)
    assert np.array_equal(a @ inv % 5, np.eye(2, dtype=int))
    with pytest.raises(MalformedInputError):
        inverse(np.array([[1, 2], [2, 4]]), 5)
