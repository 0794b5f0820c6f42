"""First cohomology of Frobenius kernels.

Two engines:

``h1_restricted(g, M)``
    H^1(G_1, M) as restricted derivations g -> M modulo inner derivations.
    A derivation satisfies D([x, y]) = x.D(y) - y.D(x); it is restricted if
    also D(x^[p]) = x_M^(p-1) D(x).  Imposing the second condition on basis
    vectors suffices (the defect is p-semilinear on derivations); tests
    re-check it on random elements anyway.

``hopf_h1(A, M)``
    Ext^1_A(k, M) for a finite-dimensional augmented algebra A, as
    eps-derivations f(ab) = a.f(b) + eps(b) f(a) modulo the maps
    f_m(a) = a.m - eps(a) m.  The condition is linear in a and the set of a
    satisfying it for all b is closed under products and contains 1 once
    f(1) = 0, so it is imposed for generators a and all basis vectors b,
    together with f(1) = 0.  With A = Dist(G_r) this is H^1(G_r, M); it is
    the derivation form of the first map of the Hochschild complex of k[G_r].

Both engines split the linear system by integer torus weight when the module
carries weights: a map of weight lam sends the weight-alpha basis vector to
M_(lam + alpha), and each weight lam is an independent system.  For
h1_restricted a weight lam with lam(h) != 0 mod p for some diagonal basis
vector h needs no solving: h.D(x) - D([h, x]) = x.D(h) forces
D = inner(D(h) / lam(h)), and M_lam meets M^g trivially, so that block has
der = rder = inner = dim M_lam.  The unsplit system is kept as
``route="full"`` and tests compare the two.
"""

from __future__ import annotations

import os
import time
from dataclasses import dataclass, field
from math import comb, factorial

import numpy as np
import scipy.sparse as sp

from .exactlin import (
    FpMatrix,
    _rref_dense,
    matmul,
    matpow,
    nullspace,
    rank,
    rank_of,
    solve,
)
from .invariants import InvariantBasis, scalar_torus, weight_blocks
from .liealg import RestrictedLieAlgebra, diagonal_coweights
from .modconstruct import RestrictedModule, check_module_axioms


class ModuleAxiomError(ValueError):
    """The module fails bracket compatibility or restrictedness; cohomology is refused."""


class DimensionCapError(ValueError):
    """An algebra above the configured dimension cap was requested."""


class InconsistentAlgebraError(ValueError):
    pass


def dim_cap() -> int:
    return int(os.environ.get("FROBKERN_DIM_CAP", "2000"))


@dataclass
class H1Report:
    context: dict
    der: int
    rder: int
    inner: int
    inv: int
    seconds: float = 0.0
    route: str = "blocked"

    @property
    def h1(self) -> int:
        return self.rder - self.inner

    def dims(self) -> dict:
        return {"der": self.der, "rder": self.rder, "inner": self.inner, "inv": self.inv,
                "h1": self.h1}


def _context(g, M, r=1, kind=None, n=None) -> dict:
    return {"kind": kind or getattr(g, "kind", None), "n": n if n is not None else getattr(g, "n", None),
            "p": M.p, "r": r, "module": M.label, "degree": M.degree}


# -- h1_restricted -----------------------------------------------------------------

@dataclass
class _Block:
    """One weight block of the derivation system: unknown layout, equations, inner maps."""
    lam: tuple | None
    col_index: list          # per Lie basis vector j: indices of M where D(b_j) may live
    offsets: np.ndarray
    bracket: np.ndarray      # rows: bracket equations
    restricted: np.ndarray   # rows: restricted equations
    inner: np.ndarray        # columns: the inner derivations x -> x.m for m in M_lam
    skipped: bool = False
    size: int = 0            # dim M_lam


def _index_by_weight(M):
    out: dict = {}
    for i, w in enumerate(map(tuple, M.weights)):
        out.setdefault(w, []).append(i)
    return {w: np.array(v, dtype=np.int64) for w, v in out.items()}


def _pmap_homogeneous(g) -> bool:
    if g.weights is None:
        return False
    for i in range(g.dim):
        for k in np.flatnonzero(g.pmap[i]):
            if not np.array_equal(g.weights[k], g.p * g.weights[i]):
                return False
    return True


def _powers(M, p):
    key = (id(M), p)
    hit = _POW_CACHE.get(key)
    if hit is not None and hit[0] is M:
        return hit[1]
    out = np.array([matpow(a, p - 1, p) for a in M.action])
    _POW_CACHE.clear()
    _POW_CACHE[key] = (M, out)
    return out


_POW_CACHE: dict = {}


def _assemble(g, M, col_index, row_of):
    """Bracket and restricted equations for unknowns D(b_j) supported on col_index[j].

    ``row_of(weight)`` gives the M-indices of a target weight (or all indices
    when the system is not split).  Returns dense (bracket, restricted) matrices.
    """
    p, m = g.p, g.dim
    A, c, P = M.action, g.structure, _powers(M, p)
    sizes = [len(ix) for ix in col_index]
    offsets = np.concatenate([[0], np.cumsum(sizes)]).astype(np.int64)
    ncols = int(offsets[-1])
    wts = g.weights

    def place(block, rows, j, mat):
        block[:, offsets[j]:offsets[j + 1]] = (block[:, offsets[j]:offsets[j + 1]] + mat) % p

    def ident(rows, j):
        # matrix sending D(b_j) coordinates to the given rows (which equal col_index[j] as sets)
        cols = col_index[j]
        E = np.zeros((len(rows), len(cols)), dtype=np.int64)
        pos = {int(v): r for r, v in enumerate(rows)}
        for k, v in enumerate(cols):
            r = pos.get(int(v))
            if r is not None:
                E[r, k] = 1
        return E

    brackets = []
    for i in range(m):
        for j in range(i + 1, m):
            rows = row_of(None if wts is None else wts[i] + wts[j])
            if rows is None or not len(rows):
                continue
            blk = np.zeros((len(rows), ncols), dtype=np.int64)
            for k in np.flatnonzero(c[i, j]):
                place(blk, rows, k, int(c[i, j, k]) * ident(rows, k))
            place(blk, rows, j, -A[i][np.ix_(rows, col_index[j])])
            place(blk, rows, i, A[j][np.ix_(rows, col_index[i])])
            brackets.append(blk)
    restr = []
    for i in range(m):
        rows = row_of(None if wts is None else p * wts[i])
        if rows is None or not len(rows):
            continue
        blk = np.zeros((len(rows), ncols), dtype=np.int64)
        for k in np.flatnonzero(g.pmap[i]):
            place(blk, rows, k, int(g.pmap[i, k]) * ident(rows, k))
        place(blk, rows, i, -P[i][np.ix_(rows, col_index[i])])
        restr.append(blk)

    def stack(blocks):
        if not blocks:
            return np.zeros((0, ncols), dtype=np.int64)
        out = np.vstack(blocks)
        return out[np.any(out, axis=1)]

    return stack(brackets), stack(restr), offsets


def _inner_columns(g, M, col_index, offsets, m_indices):
    """Columns encoding x -> x.m for each basis vector m in ``m_indices``."""
    cols = np.zeros((int(offsets[-1]), len(m_indices)), dtype=np.int64)
    for j in range(g.dim):
        ix = col_index[j]
        if len(ix):
            cols[offsets[j]:offsets[j + 1]] = M.action[j][np.ix_(ix, m_indices)]
    return cols


def _blocks(g, M, route: str):
    """Yield _Block objects covering the whole derivation system."""
    p, m = g.p, g.dim
    split = route != "full" and weight_blocks(g, M) is not None and _pmap_homogeneous(g)
    if not split:
        allix = np.arange(M.dim, dtype=np.int64)
        col_index = [allix] * m
        br, rs, off = _assemble(g, M, col_index, lambda w: allix)
        yield _Block(None, col_index, off, br, rs,
                     _inner_columns(g, M, col_index, off, allix), size=M.dim)
        return
    by_w = _index_by_weight(M)
    empty = np.zeros(0, dtype=np.int64)
    scal = scalar_torus(g, M)
    taus = diagonal_coweights(g) if scal is not None else {}
    lams = sorted({tuple(int(v) for v in np.array(w) - g.weights[j]) for w in by_w for j in range(m)})
    for lam in lams:
        lam_arr = np.array(lam, dtype=np.int64)
        own = by_w.get(lam, empty)
        col_index = [by_w.get(tuple(lam_arr + g.weights[j]), empty) for j in range(m)]
        if not any(len(ix) for ix in col_index):
            continue
        if scal is not None and any(int(lam_arr @ t) % p for t in taus.values()):
            yield _Block(lam, col_index, None, None, None, None, skipped=True, size=len(own))
            continue
        br, rs, off = _assemble(g, M, col_index,
                                lambda w: by_w.get(tuple(lam_arr + w), empty))
        yield _Block(lam, col_index, off, br, rs, _inner_columns(g, M, col_index, off, own),
                     size=len(own))


def _rank(a, p):
    return rank_of(a, p) if a.shape[0] and a.shape[1] else 0


def h1_restricted(g: RestrictedLieAlgebra, M: RestrictedModule, route: str = "auto",
                  check: bool = True) -> H1Report:
    """dim H^1(G_1, M) = dim restricted derivations - dim inner derivations."""
    t0 = time.perf_counter()
    if check:
        ok = check_module_axioms(M, g)
        if not ok:
            raise ModuleAxiomError(f"module {M.label} fails the axioms at {ok.witness}")
    p = g.p
    der = rder = inner = 0
    used = "full"
    for blk in _blocks(g, M, route):
        if blk.lam is not None:
            used = "blocked"
        if blk.skipped:
            der += blk.size
            rder += blk.size
            inner += blk.size
            continue
        ncols = int(blk.offsets[-1])
        r_br = _rank(blk.bracket, p)
        both = np.vstack([blk.bracket, blk.restricted])
        r_all = _rank(both, p)
        der += ncols - r_br
        rder += ncols - r_all
        r_inner = _rank(blk.inner.T, p) if blk.inner.shape[1] else 0
        if blk.inner.shape[1] and both.shape[0] and np.any(matmul(both, blk.inner, p)):
            raise AssertionError("an inner derivation fails the restricted-derivation equations")
        inner += r_inner
    inv = M.dim - inner
    return H1Report(_context(g, M), der, rder, inner, inv, time.perf_counter() - t0, used)


def derivation_matrix(g: RestrictedLieAlgebra, M: RestrictedModule, restricted: bool = True) -> np.ndarray:
    """The unsplit constraint matrix; unknown D(b_j) occupies columns j*dim M .. (j+1)*dim M."""
    blk = next(_blocks(g, M, "full"))
    return np.vstack([blk.bracket, blk.restricted]) if restricted else blk.bracket


@dataclass
class DerivationSpace:
    g: RestrictedLieAlgebra
    M: RestrictedModule
    basis: np.ndarray          # (k, dim M, dim g); D(x) = basis[t] @ x
    restricted: bool
    inner: np.ndarray          # (s, dim M, dim g) inner derivations spanning the inner space
    classes: np.ndarray        # (h1, dim M, dim g) representatives of a basis of H^1
    class_weights: list = field(default_factory=list)


def _embed(vecs, col_index, offsets, dimM, m):
    out = np.zeros((vecs.shape[1], dimM, m), dtype=np.int64)
    for j in range(m):
        ix = col_index[j]
        if len(ix):
            out[:, ix, j] = vecs[offsets[j]:offsets[j + 1]].T
    return out


def complement_columns(base: np.ndarray, cand: np.ndarray, p: int) -> list[int]:
    """Indices of columns of ``cand`` that, added greedily, extend span(base)."""
    rows = base.T % p if base.shape[1] else np.zeros((0, cand.shape[0]), dtype=np.int64)
    R, piv = _rref_dense(rows, p) if rows.shape[0] else (rows, [])
    keep = []
    for t in range(cand.shape[1]):
        v = cand[:, t] % p
        if piv:
            v = (v - matmul(v[piv][None, :], R, p)[0]) % p
        if np.any(v):
            keep.append(t)
            R, piv = _rref_dense(np.vstack([R, v[None, :]]) if R.shape[0] else v[None, :], p)
    return keep


def restricted_derivations(g: RestrictedLieAlgebra, M: RestrictedModule, restricted: bool = True,
                           route: str = "auto") -> DerivationSpace:
    """Explicit bases of the (restricted) derivations, the inner ones, and H^1 representatives."""
    p, m, dimM = g.p, g.dim, M.dim
    basis, inner, classes, cw = [], [], [], []
    for blk in _blocks(g, M, route):
        if blk.skipped:
            col_index = blk.col_index
            sizes = [len(ix) for ix in col_index]
            off = np.concatenate([[0], np.cumsum(sizes)]).astype(np.int64)
            lam_idx = _index_by_weight(M).get(blk.lam, np.zeros(0, dtype=np.int64))
            I = _inner_columns(g, M, col_index, off, lam_idx)
            basis.append(_embed(I, col_index, off, dimM, m))
            inner.append(_embed(I, col_index, off, dimM, m))
            continue
        system = np.vstack([blk.bracket, blk.restricted]) if restricted else blk.bracket
        ncols = int(blk.offsets[-1])
        N = nullspace(system, p) if system.shape[0] else np.eye(ncols, dtype=np.int64)
        basis.append(_embed(N, blk.col_index, blk.offsets, dimM, m))
        inner.append(_embed(blk.inner, blk.col_index, blk.offsets, dimM, m))
        keep = complement_columns(blk.inner, N, p)
        if keep:
            classes.append(_embed(N[:, keep], blk.col_index, blk.offsets, dimM, m))
            cw.extend([None if blk.lam is None else tuple(int(v) for v in blk.lam)] * len(keep))

    def cat(xs):
        xs = [x for x in xs if x.shape[0]]
        return np.concatenate(xs) if xs else np.zeros((0, dimM, m), dtype=np.int64)

    return DerivationSpace(g, M, cat(basis), restricted, cat(inner), cat(classes), cw)


# -- induced maps along a filtration ----------------------------------------------------

@dataclass
class ClassFate:
    index: int
    weight: tuple | None
    dies_at: int | None        # least level at which the image is inner; None = persists


@dataclass
class InducedMapReport:
    group: str
    p: int
    level: int
    budget: int
    h1: int
    ranks: dict                # level d' -> rank of H^1(F_d) -> H^1(F_d')
    fates: list

    @property
    def all_die(self) -> bool:
        return all(f.dies_at is not None for f in self.fates)


def _is_inner(M: RestrictedModule, D: np.ndarray) -> bool:
    """Is x -> D x (a dim M x dim g matrix) of the form x -> x.m for some m in M?"""
    p = M.p
    A = np.transpose(M.action, (0, 1, 2)).reshape(-1, M.dim)        # rows (j, i) -> (b_j m)_i
    rhs = D.T.reshape(-1) % p
    support = np.flatnonzero(np.any(A, axis=1) | (rhs != 0))
    if not support.size:
        return True
    return solve(FpMatrix.build(A[support], p), rhs[support]) is not None


def follow_classes(g: RestrictedLieAlgebra, M: RestrictedModule, stages, route: str = "auto"):
    """Push H^1(G_1, M) representatives along equivariant maps.

    ``stages`` yields (label, N, J) with J: M -> N (columns = images of the basis of M).
    Returns (number of classes, {label: rank of the induced map}, fates).
    """
    p = g.p
    space = restricted_derivations(g, M, route=route)
    reps = space.classes
    fates = [ClassFate(t, space.class_weights[t], None) for t in range(reps.shape[0])]
    ranks = {}
    for label, N, J in stages:
        images = [matmul(J, D, p) for D in reps]
        for f, img in zip(fates, images):
            if f.dies_at is None and _is_inner(N, img):
                f.dies_at = label
        ranks[label] = _image_rank(g, N, images)
        if all(f.dies_at is not None for f in fates):
            break
    return reps.shape[0], ranks, fates


def h1_induced_map(group: str, p: int, level: int, budget: int) -> InducedMapReport:
    """Follow H^1 classes of F_level k[G] into F_d' for level <= d' <= budget."""
    from .modconstruct import group_coordring_piece, group_lie_algebra, inclusion

    g = group_lie_algebra(group, p)
    F = group_coordring_piece(group, p, level)

    def stages():
        for d2 in range(level, budget + 1):
            F2 = group_coordring_piece(group, p, d2)
            yield d2, F2, inclusion(F, F2)

    h1, ranks, fates = follow_classes(g, F, stages())
    return InducedMapReport(F.group, p, level, budget, h1, ranks, fates)


def _image_rank(g, F2, images) -> int:
    """Rank of span(images) modulo inner derivations of F2."""
    if not images:
        return 0
    p = g.p
    inner = np.array([F2.action[:, :, i].T for i in range(F2.dim)])    # (dim, dim F2, m)
    flat_inner = inner.reshape(F2.dim, -1).T
    flat_img = np.array([D.reshape(-1) for D in images]).T
    return rank_of(np.hstack([flat_inner, flat_img]).T, p) - rank_of(flat_inner.T, p)


# -- augmented algebras ------------------------------------------------------------------

@dataclass(eq=False)
class AugmentedAlgebra:
    """A finite-dimensional algebra with counit and distinguished generators.

    ``left[t]`` is the matrix of left multiplication by generator t (columns
    are the coordinates of gen * x_j).  ``represent(M)`` returns the action
    of every basis vector on a module M as an array (dim, dim M, dim M).
    """
    p: int
    labels: tuple
    counit: np.ndarray
    generators: tuple        # basis indices of the generators
    left: list
    represent: object
    weights: np.ndarray | None = None
    unit: int = 0
    name: str = ""
    generator_rep: object = None    # M -> list of generator matrices (cheaper than ``represent``)
    relations: object = None        # A -> bool, defining relations on the left-regular matrices

    @property
    def dim(self) -> int:
        return len(self.labels)

    def product(self, x: int, y: int) -> np.ndarray | None:
        """Coordinates of x * y when x is a generator, else None."""
        if x in self.generators:
            return self.left[self.generators.index(x)][:, y]
        return None

    def check(self) -> bool:
        """Counit multiplicative on generator products, g * 1 = g, and the defining relations.

        The relations are checked on the left-regular matrices, so a wrong
        multiplication table shows up as a failed commutator identity.
        """
        p, eps = self.p, self.counit
        for t, gi in enumerate(self.generators):
            lhs = matmul(eps[None, :], self.left[t], p)[0]
            if not np.array_equal(lhs, (eps[gi] * eps) % p):
                return False
            if self.left[t][:, self.unit].tolist() != np.eye(self.dim, dtype=np.int64)[gi].tolist():
                return False
        return self.relations is None or bool(self.relations(self))


def _check_cap(dim: int):
    cap = dim_cap()
    if dim > cap:
        raise DimensionCapError(f"algebra dimension {dim} exceeds the cap {cap} (FROBKERN_DIM_CAP)")


# u(g) -----------------------------------------------------------------------------------

def restricted_env(g: RestrictedLieAlgebra) -> AugmentedAlgebra:
    """u(g) with PBW basis b_1^a_1 ... b_m^a_m, 0 <= a_i < p, words in mixed radix order."""
    p, m = g.p, g.dim
    dim = p ** m
    _check_cap(dim)
    c, pm = g.structure, g.pmap
    words = [tuple(int(x) for x in np.unravel_index(t, (p,) * m)) if m else () for t in range(dim)]
    index = {w: t for t, w in enumerate(words)}
    memo: dict = {}

    def add_into(acc, vec, coef):
        if coef % p == 0:
            return
        for w, v in vec.items():
            acc[w] = (acc.get(w, 0) + coef * v) % p

    def mul(i: int, w: tuple) -> dict:
        key = (i, w)
        if key in memo:
            return memo[key]
        nz = [k for k in range(m) if w[k]]
        j = nz[0] if nz else m
        if i < j:
            out = {w[:i] + (1,) + w[i + 1:]: 1}
        elif i == j:
            if w[i] + 1 < p:
                out = {w[:i] + (w[i] + 1,) + w[i + 1:]: 1}
            else:
                rest = w[:i] + (0,) + w[i + 1:]
                out = {}
                for k in np.flatnonzero(pm[i]):
                    add_into(out, mul(int(k), rest), int(pm[i, k]))
        else:
            rest = w[:j] + (w[j] - 1,) + w[j + 1:]
            out = {}
            for w2, v in mul(i, rest).items():
                add_into(out, mul(j, w2), v)
            for k in np.flatnonzero(c[i, j]):
                add_into(out, mul(int(k), rest), int(c[i, j, k]))
        out = {w2: v for w2, v in out.items() if v}
        memo[key] = out
        return out

    left = []
    for i in range(m):
        L = np.zeros((dim, dim), dtype=np.int64)
        for t, w in enumerate(words):
            for w2, v in mul(i, w).items():
                L[index[w2], t] = v
        left.append(L)
    counit = np.zeros(dim, dtype=np.int64)
    counit[index[(0,) * m]] = 1
    gens = tuple(index[tuple(1 if k == i else 0 for k in range(m))] for i in range(m))
    weights = None
    if g.weights is not None:
        weights = np.array(words, dtype=np.int64).reshape(dim, m) @ g.weights

    def represent(M: RestrictedModule) -> np.ndarray:
        pows = [[np.eye(M.dim, dtype=np.int64)] for _ in range(m)]
        for i in range(m):
            for _ in range(p - 1):
                pows[i].append(matmul(pows[i][-1], M.action[i], p))
        out = np.zeros((dim, M.dim, M.dim), dtype=np.int64)
        for t, w in enumerate(words):
            X = np.eye(M.dim, dtype=np.int64)
            for i in range(m):
                if w[i]:
                    X = matmul(X, pows[i][w[i]], p)
            out[t] = X
        return out

    def relations(A: AugmentedAlgebra) -> bool:
        L = A.left
        for i in range(m):
            for j in range(i + 1, m):
                comm = (matmul(L[i], L[j], p) - matmul(L[j], L[i], p)) % p
                if not np.array_equal(comm, np.tensordot(c[i, j], np.array(L), axes=1) % p):
                    return False
            if not np.array_equal(matpow(L[i], p, p), np.tensordot(pm[i], np.array(L), axes=1) % p):
                return False
        return True

    labels = tuple("".join(f"{g.labels[i]}^{a}" if a > 1 else g.labels[i]
                           for i, a in enumerate(w) if a) or "1" for w in words)
    return AugmentedAlgebra(p, labels, counit, gens, left, represent, weights,
                            index[(0,) * m], f"u({g.kind}_{g.n})",
                            generator_rep=lambda M: [M.action[i] % p for i in range(m)],
                            relations=relations)


# Dist((SL_2)_r) -----------------------------------------------------------------------------

def gbinom(x: int, k: int) -> int:
    """binom(x, k) for any integer x (the integer-valued polynomial evaluated at x)."""
    if k < 0:
        return 0
    num = 1
    for t in range(k):
        num *= x - t
    return num // factorial(k)


def _binomial_expansion(values_at, degree: int) -> list[int]:
    """Coefficients c_i with P(h) = sum_i c_i binom(h, i), from P(0..degree) by finite differences."""
    vals = [values_at(x) for x in range(degree + 1)]
    out = []
    for i in range(degree + 1):
        out.append(sum((-1) ** (i - l) * comb(i, l) * vals[l] for l in range(i + 1)))
    return out


def dist_sl2(p: int, r: int, borel: bool = False) -> AugmentedAlgebra:
    """Dist((SL_2)_r) with basis f^(a) binom(h, b) e^(c), 0 <= a, b, c < p^r (lex order on (a, b, c)).

    ``borel=True`` gives Dist((B)_r) for the lower-triangular Borel: basis f^(a) binom(h, b).
    Generators e^(p^s), f^(p^s), binom(h, p^s) for s < r (no e for the Borel).
    Products are computed over Z with the commutation rules

        binom(h, k) f^(a) = f^(a) binom(h - 2a, k)
        e^(k) f^(a)       = sum_j f^(a-j) binom(h - a - k + 2j, j) e^(k-j)
        e^(m) binom(h, b) = binom(h - 2m, b) e^(m)
        e^(m) e^(c)       = binom(m + c, c) e^(m+c)

    and reduced mod p; coefficients that leave the truncation are asserted to vanish mod p.
    """
    if r < 1:
        raise ValueError("r must be at least 1")
    q = p ** r
    dim = q ** (2 if borel else 3)
    _check_cap(dim)
    cs = [0] if borel else list(range(q))
    basis = [(a, b, c) for a in range(q) for b in range(q) for c in cs]
    index = {x: t for t, x in enumerate(basis)}

    def put(L, col, key, coef):
        if coef % p == 0:
            return
        if key not in index:
            raise AssertionError(f"term {key} outside the truncation with nonzero coefficient mod {p}")
        L[index[key], col] = (L[index[key], col] + coef) % p

    def mult_binom(k):
        L = np.zeros((dim, dim), dtype=np.int64)
        for col, (a, b, c) in enumerate(basis):
            coeffs = _binomial_expansion(lambda x: gbinom(x - 2 * a, k) * gbinom(x, b), k + b)
            for i, v in enumerate(coeffs):
                put(L, col, (a, i, c), v)
        return L

    def mult_f(k):
        L = np.zeros((dim, dim), dtype=np.int64)
        for col, (a, b, c) in enumerate(basis):
            put(L, col, (a + k, b, c), comb(a + k, k))
        return L

    def mult_e(k):
        L = np.zeros((dim, dim), dtype=np.int64)
        for col, (a, b, c) in enumerate(basis):
            for j in range(min(a, k) + 1):
                mm = k - j
                outer = comb(mm + c, c)
                if outer % p == 0:
                    continue
                coeffs = _binomial_expansion(
                    lambda x: gbinom(x - a - k + 2 * j, j) * gbinom(x - 2 * mm, b), j + b)
                for i, v in enumerate(coeffs):
                    put(L, col, (a - j, i, mm + c), v * outer)
        return L

    gens, left, names = [], [], []
    for s in range(r):
        k = p ** s
        if not borel:
            gens.append(index[(0, 0, k)])
            left.append(mult_e(k))
            names.append(f"e({k})")
        gens.append(index[(k, 0, 0)])
        left.append(mult_f(k))
        names.append(f"f({k})")
        gens.append(index[(0, k, 0)])
        left.append(mult_binom(k))
        names.append(f"binom(h,{k})")
    counit = np.zeros(dim, dtype=np.int64)
    counit[index[(0, 0, 0)]] = 1
    root = np.array([1, -1], dtype=np.int64)
    weights = np.array([(c - a) * root for a, b, c in basis], dtype=np.int64).reshape(dim, 2)
    labels = tuple(f"f({a})h({b})e({c})" for a, b, c in basis)
    name = f"Dist(B_{r})" if borel else f"Dist(SL2_{r})"

    def represent(M):
        return divided_power_action(M, p, r, borel=borel)

    def generator_rep(M):
        return _dp_generators(M, p, r, borel)

    def relations(A: AugmentedAlgebra) -> bool:
        # sl_2 relations among e = e^(1), f = f^(1), h = binom(h, 1); f^p = 0 and h^p = h
        named = dict(zip(names, A.left))
        Lf, Lh = named["f(1)"], named["binom(h,1)"]
        comm = lambda X, Y: (matmul(X, Y, p) - matmul(Y, X, p)) % p
        ok = np.array_equal(comm(Lh, Lf), (-2 * Lf) % p)
        ok = ok and not np.any(matpow(Lf, p, p)) and np.array_equal(matpow(Lh, p, p), Lh)
        if not borel:
            Le = named["e(1)"]
            ok = ok and np.array_equal(comm(Le, Lf), Lh) and np.array_equal(comm(Lh, Le), (2 * Le) % p)
            ok = ok and not np.any(matpow(Le, p, p))
        return bool(ok)

    return AugmentedAlgebra(p, labels, counit, tuple(gens), left, represent, weights,
                            index[(0, 0, 0)], name, generator_rep, relations)


def _sl2_lift(M: RestrictedModule, borel: bool):
    """Integer matrices (h, e, f) of an sl_2 (or lower Borel) module with an integral lift."""
    Z = M.integral_lift
    if Z is None:
        raise ValueError(f"module {M.label} has no integral lift")
    if borel:
        h, f = Z[0], Z[1]
        e = np.zeros_like(h)
    else:
        h, e, f = Z[0], Z[1], Z[2]
    if np.any(h - np.diag(np.diag(h))):
        raise ValueError("h must act diagonally on the lift")
    return np.diag(h).astype(object), e.astype(object), f.astype(object)


def _divided(N, k: int):
    """N^k / k! over Z with an integrality check."""
    P = np.eye(N.shape[0], dtype=object)
    for _ in range(k):
        P = P.dot(N)
    fk = factorial(k)
    if any(int(v) % fk for v in P.reshape(-1)):
        raise ArithmeticError(f"divided power of order {k} is not integral")
    return P // fk


def _dp_tables(M: RestrictedModule, p: int, r: int, borel: bool):
    """Residue matrices of e^(k), f^(k), binom(h, k) for k < p^r on M (through its ambient for quotients)."""
    base = M.ambient if M.integral_lift is None and M.ambient is not None else M
    hw, e, f = _sl2_lift(base, borel)
    q = p ** r
    E = [(_divided(e, k) % p).astype(np.int64) for k in range(q)]
    F = [(_divided(f, k) % p).astype(np.int64) for k in range(q)]
    H = [np.diag([gbinom(int(w), k) % p for w in hw]).astype(np.int64) for k in range(q)]
    if base is not M:
        W, P, S = M.kernel, M.projection, M.section
        for X in E + F + H:
            if W.shape[1] and np.any(matmul(P, matmul(X, W, p), p)):
                raise ValueError("the submodule is not stable under the divided powers")
        proj = lambda X: matmul(P, matmul(X, S, p), p)
        E, F, H = [proj(X) for X in E], [proj(X) for X in F], [proj(X) for X in H]
    return E, F, H


def _dp_generators(M, p, r, borel=False):
    E, F, H = _dp_tables(M, p, r, borel)
    out = []
    for s in range(r):
        k = p ** s
        if not borel:
            out.append(E[k])
        out += [F[k], H[k]]
    return out


def divided_power_action(M: RestrictedModule, p: int, r: int, borel: bool = False) -> np.ndarray:
    """Action of every basis vector f^(a) binom(h, b) e^(c) of Dist((SL_2)_r) on M.

    rho(e^(k)) is e^k / k! computed on the integral lift, rho(binom(h, k)) is
    binom(m, k) on weight-m vectors.  Quotient modules are handled through
    their ambient module and the quotient maps.
    """
    E, F, H = _dp_tables(M, p, r, borel)
    q = p ** r
    cs = [0] if borel else range(q)
    out = np.zeros((q ** (2 if borel else 3), M.dim, M.dim), dtype=np.int64)
    t = 0
    for a in range(q):
        for b in range(q):
            FH = matmul(F[a], H[b], p)
            for c in cs:
                out[t] = matmul(FH, E[c], p)
                t += 1
    return out


def check_representation(A: AugmentedAlgebra, rho: np.ndarray) -> bool:
    """rho(g x) = rho(g) rho(x) for every generator g and basis vector x."""
    p, dm = A.p, rho.shape[1]
    flat = rho.reshape(A.dim, -1)
    for gi, L in zip(A.generators, A.left):
        lhs = matmul(L.T, flat, p).reshape(A.dim, dm, dm)
        rhs = np.einsum("ij,xjk->xik", rho[gi], rho) % p
        if not np.array_equal(lhs, rhs):
            return False
    return True


def gr_invariants(M: RestrictedModule, r: int, borel: bool = False) -> InvariantBasis:
    """M^(G_r): common kernel of e^(p^s), f^(p^s), binom(h, p^s) for s < r."""
    gens = _dp_generators(M, M.p, r, borel)
    stacked = np.vstack(gens) if gens else np.zeros((0, M.dim), dtype=np.int64)
    return InvariantBasis(M, nullspace(stacked, M.p))


def hopf_h1(A: AugmentedAlgebra, M: RestrictedModule, rho: np.ndarray | None = None,
            route: str = "auto", check: bool = True) -> H1Report:
    """dim Ext^1_A(k, M) via eps-derivations modulo inner ones."""
    t0 = time.perf_counter()
    p, dA, dm = A.p, A.dim, M.dim
    if rho is None:
        rho = A.represent(M)
    if check and not check_representation(A, rho):
        raise InconsistentAlgebraError("module action is not multiplicative on generator products")
    eps = A.counit
    gen_idx = list(A.generators)
    gens_rho = [rho[gi] for gi in gen_idx]
    # M^A: common kernel of rho(g) - eps(g)
    fixed = np.vstack([(R - eps[gi] * np.eye(dm, dtype=np.int64)) % p for gi, R in zip(gen_idx, gens_rho)])

    split = route != "full" and A.weights is not None and M.weights is not None \
        and M.weights.shape[1] == A.weights.shape[1] and _graded(A, M, rho)
    if split:
        mw = _index_by_weight(M)
        lams = sorted({tuple(np.array(w) - aw) for w in mw for aw in set(map(tuple, A.weights))})
    else:
        lams = [None]
    empty = np.zeros(0, dtype=np.int64)
    der = inner = 0
    allm = np.arange(dm, dtype=np.int64)
    for lam in lams:
        if lam is None:
            col_index = [allm] * dA
            rows_of = lambda w: allm
            own = allm
        else:
            lam_arr = np.array(lam, dtype=np.int64)
            col_index = [mw.get(tuple(lam_arr + A.weights[x]), empty) for x in range(dA)]
            rows_of = lambda w, la=lam_arr: mw.get(tuple(la + w), empty)
            own = mw.get(lam, empty)
        sizes = [len(ix) for ix in col_index]
        if not sum(sizes):
            continue
        offsets = np.concatenate([[0], np.cumsum(sizes)]).astype(np.int64)
        ncols = int(offsets[-1])
        system = _eps_system(A, rho, gens_rho, col_index, offsets, rows_of, ncols)
        rk = rank(FpMatrix.build(system, p)) if system.shape[0] else 0
        der += ncols - rk
        if len(own):
            I = _eps_inner(A, rho, col_index, offsets, own, ncols)
            if system.shape[0] and _any_nonzero_product(system, I, p):
                raise AssertionError("an inner eps-derivation fails the derivation equations")
            sub = fixed[:, own]
            inner += len(own) - (sub.shape[1] - _rank(sub, p))
    return H1Report({"kind": A.name, "n": None, "p": p, "r": None, "module": M.label,
                     "degree": M.degree}, der, der, inner, dm - inner,
                    time.perf_counter() - t0, "blocked" if split else "full")


def _graded(A, M, rho) -> bool:
    W = M.weights
    for x in range(A.dim):
        rows, cols = np.nonzero(rho[x])
        if rows.size and np.any(W[rows] != W[cols] + A.weights[x]):
            return False
    for gi, L in zip(A.generators, A.left):
        rows, cols = np.nonzero(L)
        if rows.size and np.any(A.weights[rows] != A.weights[cols] + A.weights[gi]):
            return False
    return True


def _eps_system(A, rho, gens_rho, col_index, offsets, rows_of, ncols):
    """Rows of f(g x) - g.f(x) - eps(x) f(g) = 0 for generators g, basis x; plus f(1) = 0."""
    p, eps = A.p, A.counit
    data, ri, ci = [], [], []
    nrow = 0

    def emit(rows_local, block_cols, mat):
        rr, cc = np.nonzero(mat)
        data.append(mat[rr, cc] % p)
        ri.append(rows_local[rr])
        ci.append(block_cols[cc])

    for gi, Rg, L in zip(A.generators, gens_rho, A.left):
        for x in range(A.dim):
            w = A.weights[gi] + A.weights[x] if A.weights is not None else None
            rows = rows_of(w)
            if not len(rows):
                continue
            rows_local = np.arange(nrow, nrow + len(rows))
            pos = {int(v): t for t, v in enumerate(rows)}
            for y in np.flatnonzero(L[:, x]):
                cols = col_index[y]
                if not len(cols):
                    continue
                E = np.zeros((len(rows), len(cols)), dtype=np.int64)
                for k, v in enumerate(cols):
                    t = pos.get(int(v))
                    if t is not None:
                        E[t, k] = L[y, x]
                emit(rows_local, np.arange(offsets[y], offsets[y + 1]), E)
            cols = col_index[x]
            if len(cols):
                emit(rows_local, np.arange(offsets[x], offsets[x + 1]), -Rg[np.ix_(rows, cols)])
            if eps[x]:
                cols = col_index[gi]
                if len(cols):
                    E = np.zeros((len(rows), len(cols)), dtype=np.int64)
                    for k, v in enumerate(cols):
                        t = pos.get(int(v))
                        if t is not None:
                            E[t, k] = -eps[x]
                    emit(rows_local, np.arange(offsets[gi], offsets[gi + 1]), E)
            nrow += len(rows)
    u = A.unit
    cols = col_index[u]
    if len(cols):
        rows_local = np.arange(nrow, nrow + len(cols))
        emit(rows_local, np.arange(offsets[u], offsets[u + 1]), np.eye(len(cols), dtype=np.int64))
        nrow += len(cols)
    if not data:
        return np.zeros((0, ncols), dtype=np.int64)
    S = sp.csr_matrix((np.concatenate(data), (np.concatenate(ri), np.concatenate(ci))),
                      shape=(nrow, ncols), dtype=np.int64)
    S.data %= A.p
    S.eliminate_zeros()
    keep = np.flatnonzero(np.diff(S.indptr))
    S = S[keep]
    return S if S.shape[0] * S.shape[1] > 10**6 else S.toarray()


def _eps_inner(A, rho, col_index, offsets, own, ncols):
    """Columns encoding x -> x.m - eps(x) m for each basis vector m in ``own``."""
    p = A.p
    I = np.zeros((ncols, len(own)), dtype=np.int64)
    for x in range(A.dim):
        cols = col_index[x]
        if not len(cols):
            continue
        blk = rho[x][np.ix_(cols, own)].copy()
        if A.counit[x]:
            pos = {int(v): t for t, v in enumerate(cols)}
            for k, v in enumerate(own):
                t = pos.get(int(v))
                if t is not None:
                    blk[t, k] -= A.counit[x]
        I[offsets[x]:offsets[x + 1]] = blk % p
    return I


def _any_nonzero_product(system, I, p) -> bool:
    if sp.issparse(system):
        prod = system @ sp.csr_matrix(I)
        return bool(np.any(prod.toarray() % p))
    return bool(np.any(matmul(system, I, p)))


__all__ = [
    "H1Report", "h1_restricted", "restricted_derivations", "DerivationSpace", "derivation_matrix",
    "h1_induced_map", "follow_classes", "InducedMapReport", "ClassFate", "AugmentedAlgebra", "restricted_env",
    "dist_sl2", "divided_power_action", "gr_invariants", "hopf_h1", "check_representation",
    "gbinom", "ModuleAxiomError", "DimensionCapError", "InconsistentAlgebraError", "dim_cap",
    "complement_columns",
]
