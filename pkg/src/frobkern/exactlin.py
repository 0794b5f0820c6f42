"""Exact linear algebra over the prime field F_p.

Everything downstream (derivation systems, invariants, quotients) reduces to
row reduction of matrices of residues mod p.  Matrices are numpy integer
arrays; above ``SPARSE_THRESHOLD`` entries they are held as scipy CSR
matrices and reduced chunk by chunk so the dense working set stays bounded.

Pivoting is deterministic: columns are scanned left to right and the first
row (in current order) with a nonzero entry becomes the pivot.  The reduced
row echelon form of a matrix is unique, so the dense and chunked paths
produce identical output.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np
import scipy.sparse as sp

SPARSE_THRESHOLD = 10**6


class MalformedInputError(ValueError):
    """Matrix entries or modulus are not what the caller promised."""


class DimensionError(ValueError):
    pass


@lru_cache(maxsize=None)
def is_prime(p: int) -> bool:
    if p < 2:
        return False
    i = 2
    while i * i <= p:
        if p % i == 0:
            return False
        i += 1
    return True


@lru_cache(maxsize=None)
def _inverses(p: int) -> np.ndarray:
    inv = np.zeros(p, dtype=np.int64)
    for x in range(1, p):
        inv[x] = pow(x, -1, p)
    return inv


def _work_dtype(p: int):
    # a - b*c must not overflow: b*c < p^2
    return np.int32 if p < 46000 else np.int64


@dataclass(frozen=True, eq=False)
class FpMatrix:
    """A matrix of residues mod p, dense (row-major ndarray) or sparse (CSR)."""

    p: int
    data: object

    def __post_init__(self):
        if not is_prime(self.p):
            raise MalformedInputError(f"modulus {self.p} is not prime")
        d = self.data
        if sp.issparse(d):
            vals = d.data
        else:
            d = np.asarray(d)
            if d.ndim != 2:
                raise MalformedInputError("FpMatrix needs a 2-d array")
            object.__setattr__(self, "data", d)
            vals = d
        if vals.size and not np.issubdtype(np.asarray(vals).dtype, np.integer):
            raise MalformedInputError("entries must be integers")
        if vals.size and (vals.min() < 0 or vals.max() >= self.p):
            raise MalformedInputError(f"entries not reduced mod {self.p}")

    @classmethod
    def build(cls, a, p: int, reduce: bool = True, threshold: int | None = None) -> "FpMatrix":
        """Wrap ``a`` (array-like or scipy sparse), choosing the representation by size."""
        threshold = SPARSE_THRESHOLD if threshold is None else threshold
        if sp.issparse(a):
            a = sp.csr_matrix(a, dtype=np.int64)
            if reduce:
                a.data %= p
                a.eliminate_zeros()
            if a.shape[0] * a.shape[1] <= threshold:
                return cls(p, a.toarray())
            return cls(p, a)
        a = np.asarray(a, dtype=np.int64)
        if a.ndim == 1:
            a = a.reshape(-1, 1)
        if reduce:
            a = a % p
        if a.shape[0] * a.shape[1] > threshold:
            return cls(p, sp.csr_matrix(a))
        return cls(p, a)

    @property
    def shape(self) -> tuple[int, int]:
        return self.data.shape

    @property
    def rows(self) -> int:
        return self.data.shape[0]

    @property
    def cols(self) -> int:
        return self.data.shape[1]

    @property
    def is_sparse(self) -> bool:
        return sp.issparse(self.data)

    def dense(self) -> np.ndarray:
        return self.data.toarray() if self.is_sparse else self.data

    def __matmul__(self, other: "FpMatrix") -> "FpMatrix":
        if self.p != other.p:
            raise MalformedInputError("moduli differ")
        if self.cols != other.rows:
            raise DimensionError(f"cannot multiply {self.shape} by {other.shape}")
        if self.is_sparse or other.is_sparse:
            prod = sp.csr_matrix(self.data) @ sp.csr_matrix(other.data)
            return FpMatrix.build(prod, self.p)
        return FpMatrix.build(matmul(self.data, other.data, self.p), self.p, reduce=False)


def matmul(a: np.ndarray, b: np.ndarray, p: int) -> np.ndarray:
    """Product mod p of two residue arrays.

    Uses float64 BLAS whenever every partial sum stays below 2**52, which
    holds for the small primes in play; falls back to exact object arithmetic.
    """
    inner = a.shape[-1]
    if (p - 1) ** 2 * max(inner, 1) < 2**52:
        out = np.asarray(a, dtype=np.float64) @ np.asarray(b, dtype=np.float64)
        return np.mod(out, p).astype(np.int64)
    out = np.asarray(a, dtype=object) @ np.asarray(b, dtype=object)
    return (out % p).astype(np.int64)


def matpow(a: np.ndarray, k: int, p: int) -> np.ndarray:
    result = np.eye(a.shape[0], dtype=np.int64)
    base = np.asarray(a, dtype=np.int64) % p
    while k:
        if k & 1:
            result = matmul(result, base, p)
        k >>= 1
        if k:
            base = matmul(base, base, p)
    return result


def _rref_dense(a: np.ndarray, p: int, work=None) -> tuple[np.ndarray, list[int]]:
    """Reduced row echelon form; returns the nonzero rows and pivot columns."""
    a = np.array(a, dtype=work or _work_dtype(p), copy=True)
    nrows, ncols = a.shape
    inv = _inverses(p)
    pivots: list[int] = []
    r = 0
    for c in range(ncols):
        if r == nrows:
            break
        nz = np.flatnonzero(a[r:, c])
        if nz.size == 0:
            continue
        k = r + int(nz[0])
        if k != r:
            a[[r, k]] = a[[k, r]]
        v = int(a[r, c])
        if v != 1:
            a[r, c:] = (a[r, c:] * int(inv[v])) % p
        hit = np.flatnonzero(a[:, c])
        hit = hit[hit != r]
        if hit.size:
            block = a[hit, c:]
            block -= np.outer(block[:, 0], a[r, c:])
            block %= p
            a[hit, c:] = block
        pivots.append(c)
        r += 1
    return a[:r].astype(np.int64), pivots


CHUNK_ROWS = 96


def _rref_rows(chunks, ncols: int, p: int) -> tuple[np.ndarray, list[int]]:
    """Incremental RREF over a stream of dense row blocks.

    Each incoming block is first reduced against the current basis with one
    matrix product, so the per-pivot loop only ever touches a small block.
    """
    basis = np.zeros((0, ncols), dtype=np.int64)
    pivots: list[int] = []
    for chunk in chunks:
        chunk = np.asarray(chunk, dtype=np.int64) % p
        if pivots:
            chunk = (chunk - matmul(chunk[:, pivots], basis, p)) % p
        chunk = chunk[np.any(chunk, axis=1)]
        if not chunk.shape[0]:
            continue
        R, new = _rref_dense(chunk, p)
        if pivots:
            basis = (basis - matmul(basis[:, new], R, p)) % p
        basis = np.vstack([basis, R])
        pivots = pivots + new
        order = np.argsort(pivots, kind="stable")
        basis = basis[order]
        pivots = [pivots[i] for i in order]
        if len(pivots) == ncols:
            break
    return basis, pivots


def _row_chunks(a, step: int):
    for start in range(0, a.shape[0], step):
        block = a[start:start + step]
        yield block.toarray() if sp.issparse(block) else block


def rref(A: FpMatrix) -> tuple[np.ndarray, list[int]]:
    """Reduced row echelon form of A: (nonzero rows as a dense array, pivot columns)."""
    if A.is_sparse:
        step = max(CHUNK_ROWS, min(4096, SPARSE_THRESHOLD // (8 * max(A.cols, 1))))
    else:
        step = CHUNK_ROWS
    if not A.is_sparse and A.rows <= step:
        return _rref_dense(A.data, A.p)
    return _rref_rows(_row_chunks(A.data, step), A.cols, A.p)


def rank(A: FpMatrix) -> int:
    return len(rref(A)[1])


def nullspace_from_rref(R: np.ndarray, pivots: list[int], ncols: int, p: int) -> np.ndarray:
    """Columns spanning {x : R x = 0}, one per free column, in free-column order."""
    free = [c for c in range(ncols) if c not in set(pivots)]
    N = np.zeros((ncols, len(free)), dtype=np.int64)
    if free:
        N[free, np.arange(len(free))] = 1
        if pivots:
            N[pivots, :] = (-R[:, free]) % p
    return N


def rank_and_nullspace(A: FpMatrix) -> tuple[int, FpMatrix]:
    """Rank of A and a basis of its right nullspace (as the columns of an FpMatrix)."""
    R, piv = rref(A)
    N = nullspace_from_rref(R, piv, A.cols, A.p)
    return len(piv), FpMatrix.build(N, A.p, reduce=False)


def solve(A: FpMatrix, b) -> np.ndarray | None:
    """A solution of A x = b, or None.  Free variables are set to zero."""
    b = np.asarray(b, dtype=np.int64).reshape(-1)
    if b.shape[0] != A.rows:
        raise DimensionError(f"rhs has length {b.shape[0]}, matrix has {A.rows} rows")
    if b.size and (b.min() < 0 or b.max() >= A.p):
        raise MalformedInputError("rhs not reduced")
    if A.is_sparse:
        aug = FpMatrix(A.p, sp.hstack([A.data, sp.csr_matrix(b.reshape(-1, 1))]).tocsr())
    else:
        aug = FpMatrix(A.p, np.hstack([A.data, b.reshape(-1, 1)]))
    R, piv = rref(aug)
    if piv and piv[-1] == A.cols:
        return None
    x = np.zeros(A.cols, dtype=np.int64)
    for row, c in enumerate(piv):
        x[c] = R[row, -1]
    return x


# -- array-level conveniences used by the other modules ----------------------

def as_fp(a, p: int) -> FpMatrix:
    if isinstance(a, FpMatrix):
        return a
    return FpMatrix.build(a, p)


def rank_of(a, p: int) -> int:
    a = a if sp.issparse(a) else np.asarray(a)
    if a.shape[0] == 0 or a.shape[1] == 0:
        return 0
    return rank(as_fp(a, p))


def nullspace(a, p: int) -> np.ndarray:
    """Dense basis (columns) of the right nullspace of a residue array."""
    a = a if sp.issparse(a) else np.asarray(a, dtype=np.int64)
    ncols = a.shape[1]
    if a.shape[0] == 0:
        return np.eye(ncols, dtype=np.int64)
    A = as_fp(a, p)
    R, piv = rref(A)
    return nullspace_from_rref(R, piv, ncols, p)


def column_space(a: np.ndarray, p: int) -> np.ndarray:
    """Columns of the reduced basis of the column span of a (shape dim x rank)."""
    a = np.asarray(a, dtype=np.int64)
    if a.shape[1] == 0:
        return np.zeros((a.shape[0], 0), dtype=np.int64)
    R, _ = rref(as_fp(a.T, p))
    return R.T.copy()


def span_contains(basis: np.ndarray, vectors: np.ndarray, p: int) -> bool:
    """True iff every column of ``vectors`` lies in the column span of ``basis``."""
    if vectors.shape[1] == 0:
        return True
    r0 = rank_of(basis.T, p) if basis.shape[1] else 0
    both = np.hstack([basis, vectors]) if basis.shape[1] else vectors
    return rank_of(both.T, p) == r0


def same_span(u: np.ndarray, v: np.ndarray, p: int) -> bool:
    ru = rank_of(u.T, p) if u.shape[1] else 0
    rv = rank_of(v.T, p) if v.shape[1] else 0
    if ru != rv:
        return False
    return span_contains(u, v, p)


def inverse(a: np.ndarray, p: int) -> np.ndarray:
    n = a.shape[0]
    R, piv = _rref_dense(np.hstack([np.asarray(a) % p, np.eye(n, dtype=np.int64)]), p)
    if piv[:n] != list(range(n)):
        raise MalformedInputError("matrix is singular mod p")
    return R[:n, n:]
