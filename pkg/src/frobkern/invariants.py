"""Invariants, Frobenius powers and the Chevalley generators of the invariant ring.

The checks here compare subspaces of a single degree piece exactly:

* ``lemma11_check``: invariants of k[N]_d (or k[u]_d) against the span of
  q-th powers of the degree d/q piece, q = p.
* ``restriction_surjectivity_check``: invariants of k[g]_d map onto the
  invariants of k[N]_d.
* ``hilbert_check``: dim k[g]_d against the graded dimension predicted by
  freeness of k[g] over k[s_1, ..., s_n] with fibre k[N].

Sign conventions: s_k is the sum of the k x k principal minors, i.e. the
coefficient of t^(n-k) in det(tI - x) times (-1)^k.  Only the ideal the s_k
generate matters, so the sign is irrelevant.  For sp and so only even k are
used (odd coefficients vanish identically); that this list generates the
whole invariant ring is assumed, not verified.  f_rs is fixed for gl_n as the
discriminant of the characteristic polynomial, prod_{i<j} (l_i - l_j)^2.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property, lru_cache, partial
from math import comb

import numpy as np

from . import poly
from .exactlin import column_space, matmul, nullspace, rank_of, same_span
from .liealg import RestrictedLieAlgebra, diagonal_coweights
from .modconstruct import (
    RestrictedModule,
    _gate,
    coordring_piece,
    nilcone_piece,
    u_piece,
)


@dataclass(frozen=True, eq=False)
class InvariantBasis:
    module: RestrictedModule
    basis: np.ndarray   # (dim M, k); columns are invariant vectors

    @property
    def dim(self) -> int:
        return self.basis.shape[1]


# -- weight blocks -------------------------------------------------------------

def weight_blocks(g: RestrictedLieAlgebra, M: RestrictedModule) -> list[np.ndarray] | None:
    """Basis indices of M grouped by integer torus weight, or None if that grading is unusable.

    Usable means: g and M both carry weights and every basis vector b_i of g
    (of weight alpha_i) maps M_lam into M_(lam + alpha_i).  Then any linear
    condition built from the action splits along the grading.
    """
    if g.weights is None or M.weights is None or M.weights.shape[1] != g.weights.shape[1]:
        return None
    key = id(M)
    cached = _block_cache.get(key)
    if cached is not None and cached[0] is M:
        return cached[1]
    W = M.weights
    for i, a in enumerate(M.action):
        rows, cols = np.nonzero(a)
        if rows.size and np.any(W[rows] != W[cols] + g.weights[i]):
            _block_cache[key] = (M, None)
            return None
    groups: dict = {}
    for j, w in enumerate(map(tuple, W)):
        groups.setdefault(w, []).append(j)
    blocks = [np.array(groups[w], dtype=np.int64) for w in sorted(groups)]
    _block_cache[key] = (M, blocks)
    return blocks


_block_cache: dict = {}


def scalar_torus(g: RestrictedLieAlgebra, M: RestrictedModule) -> dict[int, np.ndarray] | None:
    """For each diagonal basis vector h, the scalar by which h acts on each basis vector of M.

    Returns None unless every such h acts diagonally with the scalar given by the weight.
    """
    if M.weights is None or g.chi.shape[1] != M.weights.shape[1]:
        return None
    out = {}
    for i, tau in diagonal_coweights(g).items():
        scal = (M.weights @ tau) % g.p
        a = M.action[i]
        if not np.array_equal(a, np.diag(scal)):
            return None
        out[i] = scal
    return out


# -- invariants ----------------------------------------------------------------

def invariants(g: RestrictedLieAlgebra, M: RestrictedModule) -> InvariantBasis:
    """Basis of M^g, the common kernel of all action matrices."""
    p, dim = g.p, M.dim
    blocks = weight_blocks(g, M)
    if blocks is None:
        stacked = M.action.reshape(-1, dim)
        return InvariantBasis(M, nullspace(stacked, p))
    cols = []
    for idx in blocks:
        sub = M.action[:, :, idx].reshape(-1, idx.size)
        sub = sub[np.any(sub, axis=1)]
        K = nullspace(sub, p) if sub.shape[0] else np.eye(idx.size, dtype=np.int64)
        for v in K.T:
            full = np.zeros(dim, dtype=np.int64)
            full[idx] = v
            cols.append(full)
    basis = np.array(cols, dtype=np.int64).T if cols else np.zeros((dim, 0), dtype=np.int64)
    return InvariantBasis(M, basis)


def stacked_rank(M: RestrictedModule) -> int:
    return rank_of(M.action.reshape(-1, M.dim), M.p)


# -- Frobenius powers ------------------------------------------------------------

def frobenius_power_subspace(piece_of, d: int, q: int) -> np.ndarray:
    """Columns spanning {f^q : f in the degree d/q piece} inside the degree-d piece.

    ``piece_of`` maps a degree to a PolyPiece of one family (k[g], k[N], k[u]).
    Over F_p the q-th power of sum c_mu mu is sum c_mu mu^q, so the images of
    the basis monomials span.  Zero when q does not divide d.
    """
    target = piece_of(d)
    if d % q:
        return np.zeros((target.dim, 0), dtype=np.int64)
    source = piece_of(d // q)
    cols = [target.vector({tuple(q * e for e in mu): 1}) for mu in source.monomials]
    return column_space(np.array(cols, dtype=np.int64).T, target.p)


def family(g: RestrictedLieAlgebra, name: str, lift: bool = False):
    """Degree -> piece, for name in {coordring, nilcone, u}."""
    maker = {"coordring": coordring_piece, "nilcone": nilcone_piece, "u": u_piece}[name]
    return partial(maker, g, lift=lift)


@dataclass(frozen=True)
class DegreeCheck:
    degree: int
    lhs: int
    rhs: int
    ok: bool


def lemma11_check(g: RestrictedLieAlgebra, fam: str, dmax: int) -> list[DegreeCheck]:
    """Per degree: invariants of the piece equal the span of p-th powers (lhs = inv, rhs = powers)."""
    _gate(g)
    piece_of = family(g, fam)
    out = []
    for d in range(dmax + 1):
        inv = invariants(g, piece_of(d)).basis
        frob = frobenius_power_subspace(piece_of, d, g.p)
        out.append(DegreeCheck(d, inv.shape[1], frob.shape[1], same_span(inv, frob, g.p)))
    return out


def restriction_surjectivity_check(g: RestrictedLieAlgebra, dmax: int) -> list[DegreeCheck]:
    """Per degree: the image of k[g]_d^g in k[N]_d equals k[N]_d^g (lhs = image, rhs = target)."""
    _gate(g)
    p = g.p
    out = []
    for d in range(dmax + 1):
        amb = coordring_piece(g, d)
        Q = nilcone_piece(g, d)
        image = column_space(matmul(Q.projection, invariants(g, amb).basis, p), p)
        target = invariants(g, Q).basis
        out.append(DegreeCheck(d, image.shape[1], target.shape[1], same_span(image, target, p)))
    return out


# -- Chevalley generators --------------------------------------------------------

def generic_matrix(g: RestrictedLieAlgebra) -> list[list[dict]]:
    """The N x N matrix sum_k x_k R_k with entries linear forms in the coordinates x_k (over Z)."""
    m, N = g.dim, g.N
    Z = g.int_realization
    return [[poly.linear_form([int(Z[k, a, b]) for k in range(m)]) for b in range(N)]
            for a in range(N)]


def weyl_permutations(g: RestrictedLieAlgebra) -> list[list[int]]:
    """Generators of the Weyl group as permutations of the natural basis (signed for sp/so)."""
    N, fam = g.N, g.family
    gens = []
    if fam in ("gl", "sl"):
        for a in range(N - 1):
            s = list(range(N))
            s[a], s[a + 1] = a + 1, a
            gens.append(s)
        return gens
    half = N // 2
    for a in range(half - 1):
        s = list(range(N))
        b, c = N - 1 - a, N - 2 - a
        s[a], s[a + 1], s[b], s[c] = a + 1, a, c, b
        gens.append(s)
    if half:
        s = list(range(N))
        s[half - 1], s[N - half] = N - half, half - 1
        gens.append(s)
    return gens


@dataclass(frozen=True, eq=False)
class ChevalleyData:
    g: RestrictedLieAlgebra
    generators: list          # polynomials in the coordinates of g, reduced mod p
    degrees: list[int]
    xi: list = field(default_factory=list)
    invariant: bool = False
    w_symmetric: bool = False
    generating_set: str = "proved"

    @cached_property
    def f_rs(self) -> dict | None:
        """Discriminant of det(tI - x) for gl_n (None for other kinds)."""
        if self.g.kind != "gl":
            return None
        return discriminant(self.g)


@lru_cache(maxsize=64)
def _char_coefficients(g: RestrictedLieAlgebra) -> tuple:
    """Integer polynomials s_1..s_N: sums of principal minors of the generic matrix."""
    return tuple(poly.principal_minor_sums(generic_matrix(g), g.dim))


@lru_cache(maxsize=64)
def chevalley_generators(g: RestrictedLieAlgebra) -> ChevalleyData:
    if g.parent is not None:
        raise ValueError("Chevalley generators are defined for gl, sl, sp, so")
    p = g.p
    coeffs = _char_coefficients(g)
    if g.kind == "gl":
        ks = range(1, g.N + 1)
    elif g.kind == "sl":
        ks = range(2, g.N + 1)
    else:
        ks = range(2, g.N + 1, 2)
    gens, degs = [], []
    for k in ks:
        s = poly.clean(coeffs[k - 1], p)
        if not s:
            raise AssertionError(f"characteristic coefficient s_{k} vanishes mod {p}")
        gens.append(s)
        degs.append(k)
    inv = all(_is_invariant(g, s, k) for s, k in zip(gens, degs))
    sym = all(w_symmetric(g, s) for s in gens)
    status = "proved" if g.kind in ("gl", "sl") else "assumed"
    return ChevalleyData(g, gens, degs, invariant=inv, w_symmetric=sym, generating_set=status)


def _is_invariant(g: RestrictedLieAlgebra, f: dict, d: int) -> bool:
    M = coordring_piece(g, d)
    v = M.vector(f)
    return not np.any(np.tensordot(M.action, v, axes=([2], [0])) % g.p)


def restrict_to_torus(g: RestrictedLieAlgebra, f: dict) -> dict:
    """f restricted to the diagonal subalgebra: non-diagonal coordinates set to zero."""
    T = set(g.basis_indices("diagonal"))
    return {m: c for m, c in f.items() if all(e == 0 or k in T for k, e in enumerate(m))}


def w_symmetric(g: RestrictedLieAlgebra, f: dict) -> bool:
    """The restriction of f to t is fixed by every Weyl generator acting by conjugation."""
    p, m = g.p, g.dim
    T = g.basis_indices("diagonal")
    ft = restrict_to_torus(g, f)
    for perm in weyl_permutations(g):
        P = np.eye(g.N, dtype=np.int64)[:, perm]
        images = [poly.constant(0, m) for _ in range(m)]
        # new coordinate l = sum_j M[l, j] x_j where w T_j w^-1 = sum_l M[l, j] T_l
        for j in T:
            c = g.coords(P @ g.int_realization[j] @ P.T)
            for l in np.flatnonzero(c):
                images[l] = poly.add(images[l], poly.scale(poly.variable(j, m), int(c[l])), p)
        if poly.clean(poly.substitute(ft, images, m, p), p) != poly.clean(ft, p):
            return False
    return True


def xi_functions(b: RestrictedLieAlgebra) -> list[dict]:
    """Coordinates of the diagonal basis vectors of a Borel: they vanish on u and restrict to a basis of t*."""
    return [poly.variable(k, b.dim) for k in b.basis_indices("diagonal")]


def xi_invariant(b: RestrictedLieAlgebra) -> bool:
    return all(_is_invariant(b, x, 1) for x in xi_functions(b))


def discriminant(g: RestrictedLieAlgebra) -> dict:
    """prod_{i<j} (l_i - l_j)^2 as an integer polynomial in the coordinates of gl_n.

    Computed as (-1)^(n(n-1)/2) Res(chi, chi') for the monic characteristic
    polynomial chi(t) = sum_k (-1)^k s_k t^(n-k), with the resultant taken as
    the determinant of the Sylvester matrix.
    """
    n, m = g.N, g.dim
    s = _char_coefficients(g)
    chi = [poly.constant(1, m)] + [poly.scale(s[k - 1], (-1) ** k) for k in range(1, n + 1)]
    dchi = [poly.scale(chi[k], n - k) for k in range(n)]   # coefficients of t^(n-1-k)
    size = 2 * n - 1
    zero: dict = {}
    syl = [[zero] * size for _ in range(size)]
    for r in range(n - 1):
        for k, c in enumerate(chi):
            syl[r][r + k] = c
    for r in range(n):
        for k, c in enumerate(dchi):
            syl[n - 1 + r][r + k] = c
    res = poly.det(syl, m)
    return poly.scale(res, (-1) ** (n * (n - 1) // 2))


# -- Hilbert series --------------------------------------------------------------

def _multiset_counts(degrees: list[int], dmax: int) -> list[int]:
    """Coefficients of prod_i 1/(1 - t^(d_i)) up to t^dmax."""
    c = [1] + [0] * dmax
    for e in degrees:
        for k in range(e, dmax + 1):
            c[k] += c[k - e]
    return c


def hilbert_check(g: RestrictedLieAlgebra, dmax: int) -> list[DegreeCheck]:
    """dim k[g]_d = sum_e #{generator-degree multisets of total e} * dim k[N]_(d-e).

    The right side uses the computed quotient dimensions of k[N]; equality in
    every degree is what freeness of k[g] over the invariant generators predicts.
    """
    _gate(g)
    degs = chevalley_generators(g).degrees
    counts = _multiset_counts(degs, dmax)
    nil = [nilcone_piece(g, d).dim for d in range(dmax + 1)]
    out = []
    for d in range(dmax + 1):
        lhs = comb(d + g.dim - 1, g.dim - 1)
        rhs = sum(counts[e] * nil[d - e] for e in range(d + 1))
        out.append(DegreeCheck(d, lhs, rhs, lhs == rhs))
    return out


__all__ = [
    "InvariantBasis", "invariants", "stacked_rank", "frobenius_power_subspace", "family",
    "DegreeCheck", "lemma11_check", "restriction_surjectivity_check", "ChevalleyData",
    "chevalley_generators", "xi_functions", "xi_invariant", "discriminant", "w_symmetric",
    "restrict_to_torus", "weyl_permutations", "hilbert_check", "weight_blocks", "scalar_torus",
    "generic_matrix",
]
