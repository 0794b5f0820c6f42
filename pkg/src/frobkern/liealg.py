"""Restricted Lie algebras of classical groups from faithful matrix realizations.

Every algebra is a list of N x N matrices over F_p.  Brackets are matrix
commutators and the p-power map is the literal matrix p-th power, both
re-expanded in the basis.  This makes x -> x^[p] available on arbitrary
elements, not only on basis vectors.

Basis conventions (frozen; reports depend on them):

* gl_n: e_ij in row-major order.
* sl_n: row-major over positions (i, j); position (i, i) with i < n holds
  h_i = e_ii - e_{i+1,i+1}, position (n, n) is skipped.
* sp_2n, so_N: the form has antidiagonal Gram matrix J (for sp, +1 in the
  upper half and -1 in the lower half; for so, all +1).  The algebra
  {X : X^T J + J X = 0} gets a basis of torus weight vectors, each scaled so
  its first nonzero entry in row-major order is 1, sorted by that position.
* borel / nilradical / torus of X: the basis vectors of X that are lower
  triangular / strictly lower triangular / diagonal, in X's order.

Torus weights are integer vectors: natural basis vector a has weight chi(a)
(e_a for gl/sl; +-e_i or 0 for sp/so) and e_ab has weight chi(a) - chi(b).

The ground field is always F_p.  Every object here is defined over F_p and
cohomology dimensions do not change under extension of scalars, so nothing
is gained by working over a larger field.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property

import numpy as np

from .exactlin import (
    MalformedInputError,
    _rref_dense,
    inverse,
    is_prime,
    matmul,
    matpow,
    nullspace,
    rank_of,
)

BASE_KINDS = ("gl", "sl", "sp", "so")
SUB_KINDS = ("borel", "nilradical", "torus")


class UnsupportedCharacteristicError(ValueError):
    pass


class NotInAlgebraError(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class RestrictedLieAlgebra:
    p: int
    kind: str
    n: int
    labels: tuple
    realization: np.ndarray          # (m, N, N) residues mod p
    int_realization: np.ndarray      # (m, N, N) integer lift
    chi: np.ndarray                  # (N, t) torus weight of each natural basis vector
    parent: str | None = None
    _pos: np.ndarray = field(default=None, repr=False)
    _inv: np.ndarray = field(default=None, repr=False)

    def __post_init__(self):
        flat = self.realization.reshape(self.dim, -1)
        R, piv = _rref_dense(flat, self.p)
        if len(piv) != self.dim:
            raise MalformedInputError("realization matrices are linearly dependent mod p")
        pos = np.array(piv, dtype=np.int64)
        object.__setattr__(self, "_pos", pos)
        object.__setattr__(self, "_inv", inverse(flat[:, pos], self.p))
        self.structure  # closure under brackets is checked here
        self.pmap

    @property
    def dim(self) -> int:
        return self.realization.shape[0]

    @property
    def N(self) -> int:
        return self.realization.shape[1]

    @property
    def name(self) -> str:
        base = f"{self.kind}_{self.n}"
        return f"{base}(p={self.p})"

    @property
    def family(self) -> str:
        """The reductive kind this algebra lives in (gl, sl, sp, so)."""
        return self.parent or self.kind

    def coords(self, X: np.ndarray) -> np.ndarray:
        """Coordinates of the matrix X in the basis; raises if X is not in the span."""
        vec = np.asarray(X, dtype=np.int64).reshape(-1) % self.p
        c = matmul(vec[self._pos][None, :], self._inv, self.p)[0]
        back = matmul(c[None, :], self.realization.reshape(self.dim, -1), self.p)[0]
        if not np.array_equal(back, vec):
            raise NotInAlgebraError("matrix does not lie in the algebra")
        return c

    def to_matrix(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=np.int64) % self.p
        return np.tensordot(x, self.realization, axes=1) % self.p

    @cached_property
    def structure(self) -> np.ndarray:
        """c[i, j, k] with [b_i, b_j] = sum_k c[i, j, k] b_k."""
        m, p = self.dim, self.p
        c = np.zeros((m, m, m), dtype=np.int64)
        R = self.realization
        for i in range(m):
            for j in range(i + 1, m):
                comm = (matmul(R[i], R[j], p) - matmul(R[j], R[i], p)) % p
                c[i, j] = self.coords(comm)
                c[j, i] = (-c[i, j]) % p
        return c

    @cached_property
    def pmap(self) -> np.ndarray:
        """Row i holds the coordinates of b_i^[p]."""
        return np.array([self.coords(matpow(R, self.p, self.p)) for R in self.realization],
                        dtype=np.int64).reshape(self.dim, self.dim)

    @cached_property
    def weights(self) -> np.ndarray | None:
        """Integer torus weight of each basis vector, or None if some vector is not a weight vector."""
        out = []
        for R in self.int_realization:
            ws = {tuple(self.chi[a] - self.chi[b]) for a, b in zip(*np.nonzero(R))}
            if len(ws) != 1:
                return None
            out.append(ws.pop())
        return np.array(out, dtype=np.int64).reshape(self.dim, self.chi.shape[1])

    @cached_property
    def int_structure(self) -> np.ndarray:
        """Structure constants of the integer lift (exact rational re-expansion, checked integral)."""
        m = self.dim
        flat = [[Fraction(int(v)) for v in R.reshape(-1)] for R in self.int_realization]
        pos = [int(k) for k in self._pos]
        A = [[flat[i][k] for i in range(m)] for k in pos]
        Ainv = _rational_inverse(A)
        out = np.zeros((m, m, m), dtype=np.int64)
        Z = self.int_realization
        for i in range(m):
            for j in range(m):
                comm = (Z[i] @ Z[j] - Z[j] @ Z[i]).reshape(-1)
                rhs = [Fraction(int(comm[k])) for k in pos]
                c = [sum(Ainv[r][s] * rhs[s] for s in range(m)) for r in range(m)]
                if any(x.denominator != 1 for x in c):
                    raise NotInAlgebraError("integer lift is not closed over Z")
                check = sum(int(c[r]) * Z[r] for r in range(m)).reshape(-1)
                if not np.array_equal(check, comm):
                    raise NotInAlgebraError("integer lift is not closed under brackets")
                out[i, j] = [int(x) for x in c]
        return out

    def bracket(self, x, y) -> np.ndarray:
        x = np.asarray(x, dtype=np.int64)
        y = np.asarray(y, dtype=np.int64)
        return np.einsum("i,j,ijk->k", x, y, self.structure) % self.p

    def ppower(self, x) -> np.ndarray:
        """x^[p] for an arbitrary element, via the matrix p-th power."""
        return self.coords(matpow(self.to_matrix(x), self.p, self.p))

    def ad(self, x) -> np.ndarray:
        """Matrix of y -> [x, y]."""
        x = np.asarray(x, dtype=np.int64)
        return (np.einsum("i,ijk->kj", x, self.structure) % self.p)

    @cached_property
    def ad_basis(self) -> np.ndarray:
        return np.array([self.ad(np.eye(self.dim, dtype=np.int64)[i]) for i in range(self.dim)])

    def trace_form(self) -> np.ndarray:
        R = self.realization.reshape(self.dim, -1)
        Rt = np.transpose(self.realization, (0, 2, 1)).reshape(self.dim, -1)
        return matmul(R, Rt.T, self.p)

    def check_axioms(self) -> dict:
        """Antisymmetry, Jacobi and restrictedness, checked exactly on the basis."""
        p, c, A = self.p, self.structure, self.ad_basis
        anti = bool(np.all((c + np.transpose(c, (1, 0, 2))) % p == 0))
        jacobi = True
        for i in range(self.dim):
            for j in range(self.dim):
                lhs = np.tensordot(c[i, j], A, axes=1) % p
                rhs = (matmul(A[i], A[j], p) - matmul(A[j], A[i], p)) % p
                if not np.array_equal(lhs, rhs):
                    jacobi = False
        restricted = all(
            np.array_equal(self.ad(self.pmap[i]), matpow(A[i], p, p)) for i in range(self.dim)
        )
        return {"antisymmetry": anti, "jacobi": jacobi, "restricted": restricted}

    def basis_indices(self, where: str) -> list[int]:
        """Indices of basis vectors whose realization is diagonal/lower/strict_lower/upper."""
        out = []
        for i, R in enumerate(self.int_realization):
            rows, cols = np.nonzero(R)
            if where == "diagonal" and np.all(rows == cols):
                out.append(i)
            elif where == "lower" and np.all(rows >= cols):
                out.append(i)
            elif where == "strict_lower" and np.all(rows > cols):
                out.append(i)
            elif where == "upper" and np.all(rows <= cols):
                out.append(i)
        return out

    def permuted(self, perm) -> "RestrictedLieAlgebra":
        perm = list(perm)
        return RestrictedLieAlgebra(
            self.p, self.kind, self.n, tuple(self.labels[i] for i in perm),
            self.realization[perm], self.int_realization[perm], self.chi, self.parent,
        )


def _rational_inverse(A: list[list[Fraction]]) -> list[list[Fraction]]:
    n = len(A)
    M = [row[:] + [Fraction(int(i == j)) for j in range(n)] for i, row in enumerate(A)]
    for c in range(n):
        piv = next(r for r in range(c, n) if M[r][c] != 0)
        M[c], M[piv] = M[piv], M[c]
        inv = 1 / M[c][c]
        M[c] = [v * inv for v in M[c]]
        for r in range(n):
            if r != c and M[r][c] != 0:
                f = M[r][c]
                M[r] = [a - f * b for a, b in zip(M[r], M[c])]
    return [row[n:] for row in M]


def _unit(N, a, b):
    E = np.zeros((N, N), dtype=np.int64)
    E[a, b] = 1
    return E


def _label(prefix, a, b, N):
    sep = "," if N >= 10 else ""
    return f"{prefix}{a + 1}{sep}{b + 1}"


def _gl(n):
    mats, labels = [], []
    for a in range(n):
        for b in range(n):
            mats.append(_unit(n, a, b))
            labels.append(_label("e", a, b, n))
    return mats, labels, np.eye(n, dtype=np.int64)


def _sl(n):
    mats, labels = [], []
    for a in range(n):
        for b in range(n):
            if a != b:
                mats.append(_unit(n, a, b))
                labels.append(_label("e", a, b, n))
            elif a < n - 1:
                mats.append(_unit(n, a, a) - _unit(n, a + 1, a + 1))
                labels.append(f"h{a + 1}")
    return mats, labels, np.eye(n, dtype=np.int64)


def _form_algebra(N, J, chi):
    """Weight basis of {X : X^T J + J X = 0} over Z (solutions have entries 0, +-1)."""
    groups: dict = {}
    for a in range(N):
        for b in range(N):
            groups.setdefault(tuple(chi[a] - chi[b]), []).append((a, b))
    big = 10007
    found = []
    for w, positions in groups.items():
        # linear map: coefficient vector on ``positions`` -> entries of X^T J + J X
        cols = []
        for a, b in positions:
            E = _unit(N, a, b)
            cols.append((E.T @ J + J @ E).reshape(-1))
        A = np.array(cols, dtype=np.int64).T % big
        for v in nullspace(A, big).T:
            v = np.where(v > big // 2, v - big, v)
            X = np.zeros((N, N), dtype=np.int64)
            for coef, (a, b) in zip(v, positions):
                X[a, b] = coef
            lead = X.reshape(-1)[np.flatnonzero(X.reshape(-1))[0]]
            X = X * int(np.sign(lead))
            if np.any(X.T @ J + J @ X) or np.abs(X).max() != 1:
                raise AssertionError("unexpected form-algebra basis vector")
            found.append(X)
    found.sort(key=lambda X: int(np.flatnonzero(X.reshape(-1))[0]))
    labels = []
    for X in found:
        a, b = divmod(int(np.flatnonzero(X.reshape(-1))[0]), N)
        labels.append(_label("t" if a == b else "x", a, b, N))
    return found, labels


def _sp(n):
    N = 2 * n
    J = np.zeros((N, N), dtype=np.int64)
    for i in range(N):
        J[i, N - 1 - i] = 1 if i < n else -1
    chi = np.zeros((N, n), dtype=np.int64)
    for a in range(n):
        chi[a, a] = 1
        chi[N - 1 - a, a] = -1
    mats, labels = _form_algebra(N, J, chi)
    return mats, labels, chi


def _so(N):
    J = np.zeros((N, N), dtype=np.int64)
    for i in range(N):
        J[i, N - 1 - i] = 1
    r = N // 2
    chi = np.zeros((N, r), dtype=np.int64)
    for a in range(r):
        chi[a, a] = 1
        chi[N - 1 - a, a] = -1
    mats, labels = _form_algebra(N, J, chi)
    return mats, labels, chi


def parse_kind(kind: str) -> tuple[str, str | None]:
    """'borel-of-gl' -> ('borel', 'gl'); 'sl' -> ('sl', None)."""
    kind = kind.strip().lower()
    if kind in BASE_KINDS:
        return kind, None
    for sub in SUB_KINDS:
        for sep in ("-of-", "-", "_of_", "_"):
            if kind.startswith(sub + sep):
                base = kind[len(sub) + len(sep):]
                if base in BASE_KINDS:
                    return sub, base
    raise ValueError(f"unknown algebra kind {kind!r}")


def construct(kind: str, n: int, p: int) -> RestrictedLieAlgebra:
    """Build gl_n, sl_n, sp_2n (n = rank), so_n (n = natural dimension), or a
    borel / nilradical / torus of one of them."""
    if not is_prime(p):
        raise ValueError(f"{p} is not prime")
    sub, base = parse_kind(kind)
    if base is None:
        base, sub = sub, None
    if base in ("sp", "so") and p == 2:
        raise UnsupportedCharacteristicError(
            f"{base} is not constructed in characteristic 2 (bad prime for types B, C, D)")
    if base in ("gl",) and n < 1 or base in ("sl", "so") and n < 2 or base == "sp" and n < 1:
        raise ValueError(f"rank parameter {n} too small for {base}")
    builder = {"gl": _gl, "sl": _sl, "sp": _sp, "so": _so}[base]
    mats, labels, chi = builder(n)
    if sub is not None:
        where = {"borel": "lower", "nilradical": "strict_lower", "torus": "diagonal"}[sub]
        for X in mats:
            r, c = np.nonzero(X)
            if not (np.all(r >= c) or np.all(r <= c)):
                raise AssertionError("basis vector is neither lower nor upper triangular")
        keep = [i for i, X in enumerate(mats) if _shape_ok(X, where)]
        mats = [mats[i] for i in keep]
        labels = [labels[i] for i in keep]
    Z = np.array(mats, dtype=np.int64)
    return RestrictedLieAlgebra(
        p=p, kind=sub or base, n=n, labels=tuple(labels), realization=Z % p,
        int_realization=Z, chi=chi, parent=base if sub else None,
    )


def _shape_ok(X, where):
    r, c = np.nonzero(X)
    return {"lower": np.all(r >= c), "strict_lower": np.all(r > c),
            "diagonal": np.all(r == c)}[where]


def parent_algebra(g: RestrictedLieAlgebra) -> RestrictedLieAlgebra:
    return construct(g.family, g.n, g.p) if g.parent else g


# -- standard hypotheses -------------------------------------------------------

@dataclass(frozen=True)
class HypothesisReport:
    group: str
    h1_simply_connected: bool
    h2_good_prime: bool
    h3_form_nondegenerate: bool
    notes: tuple = ()

    @property
    def overall(self) -> bool:
        return self.h1_simply_connected and self.h2_good_prime and self.h3_form_nondegenerate

    def reasons(self) -> list[str]:
        out = []
        if not self.h1_simply_connected:
            out.append("(H1) derived group not simply connected")
        if not self.h2_good_prime:
            out.append("(H2) p is a bad prime")
        if not self.h3_form_nondegenerate:
            out.append("(H3) trace form degenerate")
        return out


def root_type(g: RestrictedLieAlgebra) -> str:
    fam = g.family
    if fam in ("gl", "sl"):
        return "A"
    if fam == "sp":
        return "C"
    return "B" if g.n % 2 else "D"


# simple connectivity of the derived group, by construction
_SIMPLY_CONNECTED = {"gl": True, "sl": True, "sp": True, "so": False}
_GROUP_NAMES = {"gl": "GL_{n}", "sl": "SL_{n}", "sp": "Sp_{N}", "so": "SO_{n}"}


def check_hypotheses(g: RestrictedLieAlgebra) -> HypothesisReport:
    """(H1) from a construction table, (H2) from the good-prime table,
    (H3) from the Gram determinant of the trace form of the natural realization.

    Borel, nilradical and torus algebras report the hypotheses of the ambient group.
    """
    G = parent_algebra(g)
    fam = G.kind
    good = True if root_type(G) == "A" else G.p != 2
    nondeg = rank_of(G.trace_form(), G.p) == G.dim
    name = _GROUP_NAMES[fam].format(n=G.n, N=2 * G.n)
    notes = ("(H1) by construction",)
    return HypothesisReport(name, _SIMPLY_CONNECTED[fam], good, nondeg, notes)


# -- centralizers --------------------------------------------------------------

def centralizer_dim(g: RestrictedLieAlgebra, x) -> int:
    """dim {y in g : [y, x] = 0}."""
    return g.dim - rank_of(g.ad(x), g.p)


def sampled_min_centralizer(g: RestrictedLieAlgebra, subspace: list[int] | np.ndarray,
                            samples: int = 200, seed: int = 0) -> int:
    """Minimum of dim g_x over random x drawn from the span of the given basis vectors.

    ``subspace`` is either a list of basis indices or a (dim, s) coordinate matrix.
    A sampled minimum is only an upper bound for the true minimum.
    """
    rng = np.random.default_rng(seed)
    if isinstance(subspace, np.ndarray):
        S = subspace % g.p
    else:
        S = np.eye(g.dim, dtype=np.int64)[:, list(subspace)]
    best = g.dim
    for _ in range(samples):
        x = S @ rng.integers(0, g.p, S.shape[1]) % g.p
        best = min(best, centralizer_dim(g, x))
    return best


def diagonal_coweights(g: RestrictedLieAlgebra) -> dict[int, np.ndarray]:
    """For each diagonal basis vector h, the integer vector tau with chi @ tau = diag(h).

    A vector of torus weight lam is then scaled by h with the factor lam . tau.
    """
    out = {}
    chi = g.chi.astype(np.float64)
    for i in g.basis_indices("diagonal"):
        diag = np.diag(g.int_realization[i])
        tau = np.rint(np.linalg.lstsq(chi, diag.astype(np.float64), rcond=None)[0]).astype(np.int64)
        if not np.array_equal(g.chi @ tau, diag):
            raise AssertionError(f"diagonal vector {g.labels[i]} is not integral on the weight lattice")
        out[i] = tau
    return out


def torus_rank(g: RestrictedLieAlgebra) -> int:
    """dim of a maximal torus of the ambient reductive group."""
    G = parent_algebra(g)
    return {"gl": G.n, "sl": G.n - 1, "sp": G.n, "so": G.n // 2}[G.kind]


__all__ = [
    "RestrictedLieAlgebra", "HypothesisReport", "construct", "check_hypotheses",
    "centralizer_dim", "sampled_min_centralizer", "parse_kind", "parent_algebra",
    "UnsupportedCharacteristicError", "NotInAlgebraError", "torus_rank", "root_type",
    "diagonal_coweights",
]
