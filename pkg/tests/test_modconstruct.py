from dataclasses import replace
from math import comb

import numpy as np
import pytest

from frobkern.exactlin import matmul
from frobkern.invariants import chevalley_generators, invariants, xi_functions
from frobkern.liealg import UnsupportedCharacteristicError, construct
from frobkern.modconstruct import (
    HypothesisGateError,
    NotStableError,
    adjoint,
    check_module_axioms,
    coordring_piece,
    direct_sum,
    dual,
    group_coordring_piece,
    ideal_piece,
    inclusion,
    is_stable,
    natural,
    nilcone_piece,
    quotient,
    sym_power_dual,
    sym_power_natural,
    tensor,
    trivial,
    u_piece,
)


def hilbert_oracle(nvars, gen_degrees, d):
    """Coefficient of t^d in prod(1 - t^e) / (1 - t)^nvars, by series multiplication."""
    series = [comb(k + nvars - 1, nvars - 1) for k in range(d + 1)]
    for e in gen_degrees:
        series = [series[k] - (series[k - e] if k >= e else 0) for k in range(d + 1)]
    return series[d]


def test_coordring_dims():
    g = construct("gl", 2, 3)
    assert coordring_piece(g, 2).dim == 10
    k0 = coordring_piece(g, 0)
    assert k0.dim == 1 and not np.any(k0.action)
    for d in range(5):
        assert coordring_piece(g, d).dim == comb(d + 3, 3)


def test_sl2_char2_e_squares_to_zero():
    g = construct("sl", 2, 2)
    M = coordring_piece(g, 1)
    e = g.labels.index("e12")
    assert not np.any(matmul(M.action[e], M.action[e], 2))


def test_sym_power_examples():
    sl2 = construct("sl", 2, 3)
    assert sym_power_natural(sl2, 3).dim == 4
    S0 = sym_power_natural(sl2, 0)
    assert S0.dim == 1 and not np.any(S0.action)
    V = natural(construct("sp", 2, 3))
    assert V.dim == 4 and check_module_axioms(V, construct("sp", 2, 3))
    assert sym_power_natural(construct("gl", 3, 2), 4).integral_lift is not None


def test_nilcone_dims_match_hilbert_series():
    g = construct("gl", 2, 3)
    assert nilcone_piece(g, 2).dim == 5
    assert nilcone_piece(g, 3).dim == 7
    assert nilcone_piece(construct("sl", 2, 3), 1).dim == 3
    for kind, n, p in [("gl", 2, 2), ("gl", 3, 2), ("sl", 2, 5)]:
        g = construct(kind, n, p)
        degs = chevalley_generators(g).degrees
        for d in range(5):
            assert nilcone_piece(g, d).dim == hilbert_oracle(g.dim, degs, d)


def test_u_piece_dims():
    b2 = construct("borel-of-gl", 2, 3)
    assert u_piece(b2, 4).dim == 1
    b3 = construct("borel-of-gl", 3, 2)
    assert u_piece(b3, 2).dim == 6
    assert u_piece(b3, 0).dim == 1
    for d in range(5):
        assert u_piece(b3, d).dim == comb(d + 2, 2)


def test_quotients_are_gated():
    with pytest.raises(HypothesisGateError):
        nilcone_piece(construct("sl", 3, 3), 2)
    with pytest.raises(HypothesisGateError):
        u_piece(construct("borel-of-sl", 2, 2), 1)


def test_quotient_refuses_unstable_subspace():
    g = construct("gl", 2, 3)
    V = natural(g)
    with pytest.raises(NotStableError):
        quotient(V, np.array([[1], [0]]))


def test_group_pieces():
    assert group_coordring_piece("SL2", 3, 1).dim == 5
    assert group_coordring_piece("SL2", 3, 2).dim == 14
    with pytest.raises(UnsupportedCharacteristicError):
        group_coordring_piece("SL2", 2, 1)
    F1 = group_coordring_piece("SL2", 3, 1)
    trace = np.zeros(F1.dim, dtype=np.int64)
    trace[F1.monomials.index((1, 0, 0, 0))] = 1
    trace[F1.monomials.index((0, 0, 0, 1))] = 1
    assert not np.any(F1.action @ trace % 3)
    # level |m| + j <= d in k[B]
    for d in range(4):
        assert group_coordring_piece("B", 3, d).dim == (d + 1) ** 2


@pytest.mark.parametrize("group,p", [("SL2", 3), ("SL2", 5), ("B", 3), ("B", 5)])
def test_inclusions_equivariant(group, p):
    for d in range(3):
        for d2 in range(d + 1, 4):
            small, large = group_coordring_piece(group, p, d), group_coordring_piece(group, p, d2)
            J = inclusion(small, large)
            for As, Al in zip(small.action, large.action):
                assert np.array_equal(matmul(Al, J, p), matmul(J, As, p))


def test_axiom_examples():
    g = construct("gl", 2, 5)
    assert check_module_axioms(adjoint(g), g)
    sp4 = construct("sp", 2, 3)
    assert check_module_axioms(natural(sp4), sp4)
    V = natural(g)
    bad = V.action.copy()
    bad[1, 0, 0] = (bad[1, 0, 0] + 1) % 5
    res = check_module_axioms(replace(V, action=bad), g)
    assert not res and res.witness is not None and res.witness[0] in ("bracket", "restricted")


def _all_modules():
    for kind, n, p in [("gl", 2, 2), ("gl", 2, 3), ("sl", 2, 3), ("sl", 3, 2), ("sp", 2, 3),
                       ("so", 4, 5), ("gl", 3, 3)]:
        g = construct(kind, n, p)
        yield g, trivial(g)
        yield g, adjoint(g)
        yield g, natural(g)
        yield g, dual(natural(g))
        yield g, tensor(natural(g), dual(natural(g)))
        yield g, direct_sum(natural(g), adjoint(g))
        yield g, sym_power_natural(g, 3)
        yield g, sym_power_dual(g, 2)
        yield g, coordring_piece(g, 2)
        if kind in ("gl", "sl") and n % p:
            yield g, nilcone_piece(g, 3)
    for kind, n, p in [("borel-of-gl", 2, 3), ("borel-of-gl", 3, 2), ("borel-of-sl", 2, 5)]:
        b = construct(kind, n, p)
        yield b, coordring_piece(b, 3)
        yield b, u_piece(b, 3)
    for group, p in [("SL2", 3), ("B", 5)]:
        F = group_coordring_piece(group, p, 3)
        yield construct("sl" if group == "SL2" else "borel-of-sl", 2, p), F


@pytest.mark.parametrize("g,M", list(_all_modules()), ids=lambda x: getattr(x, "label", None) or x.name)
def test_every_constructor_is_a_restricted_module(g, M):
    res = check_module_axioms(M, g)
    assert res, res.witness


def test_integral_lifts_reduce_to_action():
    g = construct("sl", 2, 3)
    for M in (sym_power_natural(g, 4), sym_power_dual(g, 4), coordring_piece(g, 2, lift=True)):
        assert np.array_equal(M.integral_lift % 3, M.action)


@pytest.mark.parametrize("kind,n,p,dmax", [("gl", 2, 2, 6), ("gl", 2, 3, 6), ("sl", 2, 5, 6), ("gl", 3, 2, 4),
                                           ("sp", 2, 3, 3), ("so", 4, 3, 3)])
def test_nilcone_ideal_stable(kind, n, p, dmax):
    g = construct(kind, n, p)
    gens = chevalley_generators(g).generators
    for d in range(dmax + 1):
        amb = coordring_piece(g, d)
        assert is_stable(amb, ideal_piece(amb, gens))


@pytest.mark.parametrize("kind,n,p", [("borel-of-gl", 2, 3), ("borel-of-gl", 3, 2), ("borel-of-sl", 3, 2)])
def test_u_ideal_stable(kind, n, p):
    b = construct(kind, n, p)
    for d in range(5):
        amb = coordring_piece(b, d)
        assert is_stable(amb, ideal_piece(amb, xi_functions(b)))


def test_sym_dual_differs_from_dual_of_sym_in_char_p():
    # at p = 2 the squares in S^2(V*) are invariant, while (S^2 V)* has no invariants
    g = construct("gl", 2, 2)
    assert invariants(g, sym_power_dual(g, 2)).dim == 2
    assert invariants(g, dual(sym_power_natural(g, 2))).dim == 0
