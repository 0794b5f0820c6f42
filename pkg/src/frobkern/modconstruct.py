"""Restricted modules: symmetric powers, coordinate-ring pieces, quotients, k[SL_2], k[B].

A module is one action matrix per Lie-algebra basis vector.  Modules built
from polynomials carry integer torus weights on their basis (used to split
cohomology computations into independent weight blocks) and, on request, an
integer lift of the action (needed to build divided-power actions).

The adjoint action preserves polynomial degree and cohomology of the finite
dimensional algebra u(g) commutes with direct sums in the coefficients, so
H^1(G_1, k[g]) = 0 exactly when H^1(G_1, k[g]_d) = 0 for every d.  Checking
degree by degree up to a cutoff is therefore exact for the pieces checked.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from . import poly
from .exactlin import _rref_dense, matmul, matpow
from .liealg import RestrictedLieAlgebra, UnsupportedCharacteristicError, check_hypotheses, construct


class HypothesisGateError(ValueError):
    """A construction that is only justified under (H1)-(H3) was requested without them."""


class NotStableError(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class RestrictedModule:
    p: int
    action: np.ndarray                       # (m, dim, dim) residues
    label: str
    degree: int | None = None
    weights: np.ndarray | None = None        # (dim, t) integer torus weights
    integral_lift: np.ndarray | None = None  # (m, dim, dim) integers reducing to ``action``
    ambient: "RestrictedModule | None" = None
    projection: np.ndarray | None = None     # (dim, ambient.dim)
    section: np.ndarray | None = None        # (ambient.dim, dim)
    kernel: np.ndarray | None = None         # (ambient.dim, s) basis of the submodule divided out

    @property
    def dim(self) -> int:
        return self.action.shape[1]

    @property
    def g_dim(self) -> int:
        return self.action.shape[0]

    def rho(self, x) -> np.ndarray:
        """Action matrix of an arbitrary Lie algebra element given in coordinates."""
        return np.tensordot(np.asarray(x, dtype=np.int64), self.action, axes=1) % self.p


@dataclass(frozen=True, eq=False)
class PolyPiece(RestrictedModule):
    """A degree piece of a polynomial algebra (or of a quotient of one) with its monomial basis.

    ``monomials`` index the basis; for quotients they are the standard
    monomials, i.e. the non-pivot columns after reducing the ideal piece.
    """

    nvars: int = 0
    monomials: tuple = ()

    def vector(self, f: dict) -> np.ndarray:
        """Coordinates of a homogeneous polynomial of this degree (projected for quotients)."""
        if self.ambient is None:
            return poly.to_vector(f, self.nvars, self.degree, self.p)
        return matmul(self.projection, poly.to_vector(f, self.nvars, self.degree, self.p)[:, None],
                      self.p)[:, 0]

    def product_vector(self, f: dict, g: dict) -> np.ndarray:
        """Coordinates of f * g, the degrees of f and g adding up to this piece's degree."""
        return self.vector(poly.mul(f, g, self.p))


@dataclass(frozen=True, eq=False)
class FilteredPiece(RestrictedModule):
    """A filtration level of k[SL_2] or k[B] under the conjugation action."""

    group: str = ""
    monomials: tuple = ()


@dataclass(frozen=True)
class AxiomCheck:
    ok: bool
    witness: tuple | None = None

    def __bool__(self):
        return self.ok


def check_module_axioms(M: RestrictedModule, g: RestrictedLieAlgebra) -> AxiomCheck:
    """Bracket compatibility for all i < j and rho(b_i^[p]) = rho(b_i)^p for all i."""
    if M.g_dim != g.dim or M.p != g.p:
        return AxiomCheck(False, ("shape",))
    p, A, c = g.p, M.action, g.structure
    for i in range(g.dim):
        for j in range(i + 1, g.dim):
            lhs = np.tensordot(c[i, j], A, axes=1) % p
            rhs = (matmul(A[i], A[j], p) - matmul(A[j], A[i], p)) % p
            if not np.array_equal(lhs, rhs):
                return AxiomCheck(False, ("bracket", i, j))
    for i in range(g.dim):
        if not np.array_equal(M.rho(g.pmap[i]), matpow(A[i], p, p)):
            return AxiomCheck(False, ("restricted", i))
    return AxiomCheck(True)


# -- elementary constructors ---------------------------------------------------

def trivial(g: RestrictedLieAlgebra) -> RestrictedModule:
    t = g.weights.shape[1] if g.weights is not None else 1
    return PolyPiece(g.p, np.zeros((g.dim, 1, 1), dtype=np.int64), "k", 0,
                     np.zeros((1, t), dtype=np.int64), np.zeros((g.dim, 1, 1), dtype=np.int64),
                     nvars=0, monomials=((),))


def adjoint(g: RestrictedLieAlgebra) -> RestrictedModule:
    return RestrictedModule(g.p, g.ad_basis.copy(), "ad", None, g.weights)


def dual(M: RestrictedModule) -> RestrictedModule:
    A = (-np.transpose(M.action, (0, 2, 1))) % M.p
    lift = None if M.integral_lift is None else -np.transpose(M.integral_lift, (0, 2, 1))
    w = None if M.weights is None else -M.weights
    return RestrictedModule(M.p, A, f"({M.label})*", M.degree, w, lift)


def tensor(M: RestrictedModule, N: RestrictedModule) -> RestrictedModule:
    Im, In = np.eye(M.dim, dtype=np.int64), np.eye(N.dim, dtype=np.int64)
    A = np.array([(np.kron(a, In) + np.kron(Im, b)) % M.p for a, b in zip(M.action, N.action)])
    lift = None
    if M.integral_lift is not None and N.integral_lift is not None:
        lift = np.array([np.kron(a, In) + np.kron(Im, b)
                         for a, b in zip(M.integral_lift, N.integral_lift)])
    w = None
    if M.weights is not None and N.weights is not None:
        w = (M.weights[:, None, :] + N.weights[None, :, :]).reshape(M.dim * N.dim, -1)
    return RestrictedModule(M.p, A, f"{M.label}(x){N.label}", None, w, lift)


def direct_sum(M: RestrictedModule, N: RestrictedModule) -> RestrictedModule:
    def blockdiag(X, Y):
        out = np.zeros((X.shape[0], M.dim + N.dim, M.dim + N.dim), dtype=np.int64)
        out[:, :M.dim, :M.dim] = X
        out[:, M.dim:, M.dim:] = Y
        return out

    lift = None
    if M.integral_lift is not None and N.integral_lift is not None:
        lift = blockdiag(M.integral_lift, N.integral_lift)
    w = None
    if M.weights is not None and N.weights is not None:
        w = np.vstack([M.weights, N.weights])
    return RestrictedModule(M.p, blockdiag(M.action, N.action), f"{M.label}+{N.label}", None, w, lift)


def _sym_action(L: np.ndarray, nvars: int, d: int) -> np.ndarray:
    """Action on degree-d monomials of the derivation extending ``L`` on the variables.

    L[i][j, k] is the coefficient of variable j in b_i . (variable k).  Integer in, integer out.
    """
    mons = poly.monomials(nvars, d)
    idx = poly.monomial_index(nvars, d)
    m = L.shape[0]
    A = np.zeros((m, len(mons), len(mons)), dtype=np.int64)
    support = [(j, k) for k in range(nvars) for j in range(nvars) if np.any(L[:, j, k])]
    for col, mu in enumerate(mons):
        for j, k in support:
            e = mu[k]
            if not e:
                continue
            nu = list(mu)
            nu[k] -= 1
            nu[j] += 1
            A[:, idx[tuple(nu)], col] += e * L[:, j, k]
    return A


def _monomial_weights(var_weights: np.ndarray, nvars: int, d: int) -> np.ndarray:
    mons = np.array(poly.monomials(nvars, d), dtype=np.int64).reshape(-1, nvars)
    return mons @ var_weights


@lru_cache(maxsize=256)
def coordring_piece(g: RestrictedLieAlgebra, d: int, lift: bool = False) -> PolyPiece:
    """k[g]_d: degree-d polynomial functions on g, with (x.f)(y) = -f([x, y]).

    Variables are the coordinate functions dual to the basis of g, in basis order.
    """
    if d < 0:
        raise ValueError("degree must be nonnegative")
    m = g.dim
    L = -g.structure    # L[i][j, k] = -c[i, j, k]
    A = _sym_action(L, m, d) % g.p
    Z = None
    if lift:
        Z = _sym_action(-g.int_structure, m, d)
    w = None if g.weights is None else _monomial_weights(-g.weights, m, d)
    return PolyPiece(g.p, A, f"k[{g.kind}_{g.n}]_{d}", d, w, Z, nvars=m,
                     monomials=poly.monomials(m, d))


@lru_cache(maxsize=256)
def sym_power_natural(g: RestrictedLieAlgebra, i: int, lift: bool = True) -> PolyPiece:
    """S^i V for the natural module V = F_p^N of the matrix realization."""
    N = g.N
    A = _sym_action(np.asarray(g.realization, dtype=np.int64), N, i) % g.p   # L[b][l, a] = R_b[l, a]
    Z = _sym_action(g.int_realization, N, i) if lift else None
    w = _monomial_weights(g.chi, N, i)
    return PolyPiece(g.p, A, f"S^{i}V", i, w, Z, nvars=N, monomials=poly.monomials(N, i))


@lru_cache(maxsize=256)
def sym_power_dual(g: RestrictedLieAlgebra, i: int, lift: bool = True) -> PolyPiece:
    """S^i(V*), polynomial functions of degree i on V.  Not the dual of S^i V in characteristic p."""
    N = g.N
    L = -np.transpose(np.asarray(g.int_realization, dtype=np.int64), (0, 2, 1))
    A = _sym_action(L, N, i) % g.p
    Z = _sym_action(L, N, i) if lift else None
    w = _monomial_weights(-g.chi, N, i)
    return PolyPiece(g.p, A, f"S^{i}V*", i, w, Z, nvars=N, monomials=poly.monomials(N, i))


def natural(g: RestrictedLieAlgebra) -> PolyPiece:
    return sym_power_natural(g, 1)


# -- quotients -----------------------------------------------------------------

def _quotient_maps(W: np.ndarray, dim: int, p: int):
    if W.shape[1]:
        R, piv = _rref_dense(W.T % p, p)
    else:
        R, piv = np.zeros((0, dim), dtype=np.int64), []
    pivset = set(piv)
    keep = [j for j in range(dim) if j not in pivset]
    P = np.zeros((len(keep), dim), dtype=np.int64)
    P[np.arange(len(keep)), keep] = 1
    if piv:
        P[:, piv] = (-R[:, keep].T) % p
    S = np.zeros((dim, len(keep)), dtype=np.int64)
    S[keep, np.arange(len(keep))] = 1
    basis = R.T.copy()
    return P, S, keep, basis


def is_stable(M: RestrictedModule, W: np.ndarray) -> bool:
    """g . span(W) is contained in span(W)."""
    P, _, _, basis = _quotient_maps(W, M.dim, M.p)
    if not basis.shape[1]:
        return True
    return all(not np.any(matmul(P, matmul(a, basis, M.p), M.p)) for a in M.action)


def quotient(M: RestrictedModule, W: np.ndarray, label: str | None = None) -> RestrictedModule:
    """M / span(W).  Refuses if span(W) is not a submodule."""
    p = M.p
    P, S, keep, basis = _quotient_maps(np.asarray(W, dtype=np.int64), M.dim, p)
    if basis.shape[1]:
        for i, a in enumerate(M.action):
            if np.any(matmul(P, matmul(a, basis, p), p)):
                raise NotStableError(f"subspace not stable under basis vector {i}")
    A = np.array([matmul(P, matmul(a, S, p), p) for a in M.action]).reshape(M.g_dim, len(keep), len(keep))
    w = None if M.weights is None else M.weights[keep]
    fields = dict(p=p, action=A, label=label or f"{M.label}/W", degree=M.degree, weights=w,
                  integral_lift=None, ambient=M, projection=P, section=S, kernel=basis)
    if isinstance(M, PolyPiece):
        return PolyPiece(**fields, nvars=M.nvars, monomials=tuple(M.monomials[j] for j in keep))
    return RestrictedModule(**fields)


def _gate(g: RestrictedLieAlgebra):
    rep = check_hypotheses(g)
    if not rep.overall:
        raise HypothesisGateError(f"{g.kind}_{g.n} at p={g.p}: " + "; ".join(rep.reasons()))


def ideal_piece(ambient: PolyPiece, generators: list[dict]) -> np.ndarray:
    """Columns spanning the degree-d piece of the ideal generated by ``generators``."""
    d, nv, p = ambient.degree, ambient.nvars, ambient.p
    cols = []
    for s in generators:
        e = poly.degree(s)
        if e > d:
            continue
        for mu in poly.monomials(nv, d - e):
            cols.append(poly.to_vector(poly.mul(s, {mu: 1}, p), nv, d, p))
    if not cols:
        return np.zeros((ambient.dim, 0), dtype=np.int64)
    return np.array(cols, dtype=np.int64).T


@lru_cache(maxsize=256)
def nilcone_piece(g: RestrictedLieAlgebra, d: int, lift: bool = False) -> PolyPiece:
    """k[N]_d = k[g]_d modulo the degree-d part of the ideal (s_1, ..., s_n)."""
    from .invariants import chevalley_generators

    if g.parent is not None:
        raise ValueError("nilcone pieces are built on a reductive algebra, not a subalgebra")
    _gate(g)
    gens = chevalley_generators(g).generators
    amb = coordring_piece(g, d, lift)
    W = ideal_piece(amb, gens)
    return quotient(amb, W, f"k[N({g.kind}_{g.n})]_{d}")


@lru_cache(maxsize=256)
def u_piece(b: RestrictedLieAlgebra, d: int, lift: bool = False) -> PolyPiece:
    """k[u]_d = k[b]_d modulo the degree-d part of the ideal (xi_1, ..., xi_n)."""
    from .invariants import xi_functions

    if b.kind != "borel" or b.parent not in ("gl", "sl"):
        raise ValueError("u_piece needs the Borel subalgebra of gl_n or sl_n")
    _gate(b)
    amb = coordring_piece(b, d, lift)
    W = ideal_piece(amb, xi_functions(b))
    return quotient(amb, W, f"k[u({b.parent}_{b.n})]_{d}")


# -- k[SL_2] and k[B] under conjugation ---------------------------------------

def _generator_derivations(g: RestrictedLieAlgebra, gen_matrix, nvars):
    """For each basis X of g, the entries of A X - X A for the symbolic matrix A."""
    out = []
    for X in g.int_realization:
        D = [[{} for _ in range(2)] for _ in range(2)]
        for i in range(2):
            for j in range(2):
                acc: dict = {}
                for k in range(2):
                    if X[k, j]:
                        acc = poly.add(acc, poly.scale(gen_matrix[i][k], int(X[k, j])))
                    if X[i, k]:
                        acc = poly.add(acc, poly.scale(gen_matrix[k][j], -int(X[i, k])))
                D[i][j] = acc
        out.append(D)
    return out


@lru_cache(maxsize=None)
def _sl2_normal_form(mono: tuple) -> dict:
    """Rewrite a*d -> b*c + 1 until no monomial is divisible by a*d (exponents of a, b, c, d)."""
    a, b, c, d = mono
    if a == 0 or d == 0:
        return {mono: 1}
    out: dict = {}
    for term in ((a - 1, b + 1, c + 1, d - 1), (a - 1, b, c, d - 1)):
        for m, v in _sl2_normal_form(term).items():
            out[m] = out.get(m, 0) + v
    return poly.clean(out)


def _sl2_basis(d: int) -> list[tuple]:
    out = []
    for deg in range(d + 1):
        out.extend(m for m in poly.monomials(4, deg) if not (m[0] and m[3]))
    return out


def _b_basis(d: int) -> list[tuple]:
    out = []
    for level in range(d + 1):
        for m in range(level, -level - 1, -1):
            j = level - abs(m)
            out.append((m, j))
    return out


def _apply_derivation(mono, gen_images, nvars):
    """Leibniz rule on a (Laurent) monomial; gen_images[v] is the image of variable v."""
    out: dict = {}
    for v in range(nvars):
        e = mono[v]
        if not e:
            continue
        rest = list(mono)
        rest[v] -= 1
        for m, c in gen_images[v].items():
            nu = tuple(a + b for a, b in zip(rest, m))
            out[nu] = out.get(nu, 0) + e * c
    return poly.clean(out)


@lru_cache(maxsize=64)
def group_coordring_piece(group: str, p: int, d: int, lift: bool = False) -> FilteredPiece:
    """Filtration level d of k[SL_2] or k[B] (B the lower-triangular Borel of SL_2).

    k[SL_2] = k[a, b, c, d]/(ad - bc - 1); level d is spanned by the monomials of
    degree <= d not divisible by a*d.  k[B] = k[a, a^-1, c]; level d is spanned by
    a^m c^j with |m| + j <= d.  Basis order: by level, then deg-lex (SL_2) or by
    exponent of a descending (B).  The Lie algebra acts through the derivation
    A -> A X - X A on the matrix A of coordinate functions.
    """
    grp = _group_name(group)
    if p % 2 == 0:
        raise UnsupportedCharacteristicError(f"{grp} pieces need p odd (p does not divide 2)")
    if grp == "SL2":
        g = construct("sl", 2, p)
        A = [[{(1, 0, 0, 0): 1}, {(0, 1, 0, 0): 1}], [{(0, 0, 1, 0): 1}, {(0, 0, 0, 1): 1}]]
        images = []
        for D in _generator_derivations(g, A, 4):
            images.append([D[0][0], D[0][1], D[1][0], D[1][1]])
        basis = _sl2_basis(d)
        nvars = 4
        reduce = _sl2_normal_form
        var_w = np.array([[0, 0], [-1, 1], [1, -1], [0, 0]], dtype=np.int64)
    else:
        g = construct("borel-of-sl", 2, p)
        A = [[{(1, 0): 1}, {}], [{(0, 1): 1}, {(-1, 0): 1}]]
        images = []
        for D in _generator_derivations(g, A, 2):
            da, dc = D[0][0], D[1][0]
            check = _apply_derivation((-1, 0), [da, dc], 2)
            if check != poly.clean(D[1][1]):
                raise AssertionError("conjugation action inconsistent on a^-1")
            images.append([da, dc])
        basis = _b_basis(d)
        nvars = 2
        reduce = lambda m: {m: 1}
        var_w = np.array([[0, 0], [1, -1]], dtype=np.int64)
    idx = {m: i for i, m in enumerate(basis)}
    Z = np.zeros((g.dim, len(basis), len(basis)), dtype=np.int64)
    for bi, imgs in enumerate(images):
        for col, mono in enumerate(basis):
            for m, c in _apply_derivation(mono, imgs, nvars).items():
                for nf, c2 in reduce(m).items():
                    Z[bi, idx[nf], col] += c * c2
    w = np.array(basis, dtype=np.int64).reshape(-1, nvars) @ var_w
    return FilteredPiece(p, Z % p, f"F_{d}k[{grp}]", d, w, Z if lift else None,
                         group=grp, monomials=tuple(basis))


def _group_name(group: str) -> str:
    key = group.replace("_", "").replace(" ", "").lower()
    if key in ("sl2",):
        return "SL2"
    if key in ("b", "borel", "bsl2", "b<sl2", "bsubsl2"):
        return "B"
    raise ValueError(f"unknown group {group!r}; expected SL2 or B")


def inclusion(small: FilteredPiece, large: FilteredPiece) -> np.ndarray:
    """Matrix of the inclusion F_d -> F_d' (columns = images of the small basis)."""
    idx = {m: i for i, m in enumerate(large.monomials)}
    J = np.zeros((large.dim, small.dim), dtype=np.int64)
    for j, m in enumerate(small.monomials):
        J[idx[m], j] = 1
    return J


def group_lie_algebra(group: str, p: int) -> RestrictedLieAlgebra:
    return construct("sl" if _group_name(group) == "SL2" else "borel-of-sl", 2, p)


__all__ = [
    "RestrictedModule", "PolyPiece", "FilteredPiece", "AxiomCheck", "HypothesisGateError",
    "NotStableError", "check_module_axioms", "trivial", "adjoint", "dual", "tensor",
    "direct_sum", "coordring_piece", "sym_power_natural", "sym_power_dual", "natural", "quotient", "is_stable",
    "ideal_piece", "nilcone_piece", "u_piece", "group_coordring_piece", "inclusion",
    "group_lie_algebra",
]
