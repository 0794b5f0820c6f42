import numpy as np
import pytest

from frobkern.exactlin import matmul
from frobkern.liealg import (
    UnsupportedCharacteristicError,
    centralizer_dim,
    check_hypotheses,
    construct,
    sampled_min_centralizer,
    torus_rank,
)

CORPUS = [
    ("gl", 1, 2), ("gl", 2, 2), ("gl", 2, 3), ("gl", 3, 2), ("gl", 3, 5),
    ("sl", 2, 2), ("sl", 2, 3), ("sl", 3, 3), ("sl", 3, 5), ("sl", 4, 2),
    ("sp", 1, 3), ("sp", 2, 3), ("sp", 2, 5),
    ("so", 3, 3), ("so", 4, 3), ("so", 5, 5),
    ("borel-of-gl", 2, 2), ("borel-of-gl", 3, 3), ("borel-of-sl", 2, 3),
    ("nilradical-of-gl", 3, 2), ("torus-of-sl", 3, 5), ("borel-of-sp", 2, 3),
]


def test_gl2_example():
    g = construct("gl", 2, 3)
    assert g.dim == 4
    assert g.check_axioms()["jacobi"]


@pytest.mark.parametrize("n", [1, 2, 3])
def test_sp_dimension(n):
    # basis count 2n^2 + n
    assert construct("sp", n, 3).dim == 2 * n * n + n


@pytest.mark.parametrize("kind", ["so", "sp", "borel-of-so"])
def test_char_two_gate(kind):
    with pytest.raises(UnsupportedCharacteristicError):
        construct(kind, 4, 2)


def test_so_dimension():
    for N in (3, 4, 5, 6):
        assert construct("so", N, 3).dim == N * (N - 1) // 2


def test_gl_basis_order_row_major():
    g = construct("gl", 3, 5)
    assert g.labels == ("e11", "e12", "e13", "e21", "e22", "e23", "e31", "e32", "e33")
    b = construct("borel-of-gl", 3, 5)
    assert all(int(l[1]) >= int(l[2]) for l in b.labels)


@pytest.mark.parametrize("kind,n,p", CORPUS)
def test_axioms_hold(kind, n, p):
    assert all(construct(kind, n, p).check_axioms().values())


@pytest.mark.parametrize("kind,n,p", CORPUS)
def test_pmap_is_matrix_power(kind, n, p):
    g = construct(kind, n, p)
    rng = np.random.default_rng(0)
    for _ in range(5):
        x = rng.integers(0, p, g.dim)
        X = g.to_matrix(x)
        Xp = np.linalg.matrix_power(X.astype(object), p) % p
        assert np.array_equal(g.to_matrix(g.ppower(x)), Xp.astype(np.int64))


@pytest.mark.parametrize("kind,n,p", [c for c in CORPUS if "-" not in c[0]])
def test_trace_form_associative(kind, n, p):
    g = construct(kind, n, p)
    B = g.trace_form()
    rng = np.random.default_rng(1)
    for _ in range(100):
        x, y, z = rng.integers(0, p, (3, g.dim))
        lhs = g.bracket(x, y) @ B @ z % p
        rhs = x @ B @ g.bracket(y, z) % p
        assert lhs == rhs


def test_hypothesis_examples():
    assert check_hypotheses(construct("gl", 2, 2)).overall
    rep = check_hypotheses(construct("sl", 3, 3))
    assert not rep.h3_form_nondegenerate and not rep.overall
    assert check_hypotheses(construct("sl", 2, 5)).overall


@pytest.mark.parametrize("kind,n,p", [c for c in CORPUS if "-" not in c[0]])
def test_h3_table(kind, n, p):
    expected = {"gl": True, "sl": n % p != 0, "sp": True, "so": True}[kind]
    rep = check_hypotheses(construct(kind, n, p))
    assert rep.h3_form_nondegenerate == expected
    assert rep.overall == (rep.h1_simply_connected and rep.h2_good_prime and rep.h3_form_nondegenerate)


def test_h1_by_construction():
    rep = check_hypotheses(construct("so", 3, 3))
    assert not rep.h1_simply_connected
    assert "(H1) by construction" in rep.notes
    assert check_hypotheses(construct("borel-of-gl", 2, 3)).group == "GL_2"


def test_centralizer_examples():
    g = construct("gl", 2, 3)
    assert centralizer_dim(g, np.zeros(4, dtype=int)) == 4
    assert centralizer_dim(g, [0, 1, 0, 0]) == 2
    assert centralizer_dim(construct("gl", 2, 5), [1, 0, 0, 2]) == 2


@pytest.mark.parametrize("kind,n,p", [("gl", 2, 2), ("gl", 3, 3), ("gl", 4, 5), ("sl", 2, 3), ("sl", 3, 2), ("sl", 4, 3)])
def test_regular_nilpotent_centralizer(kind, n, p):
    g = construct(kind, n, p)
    found = sampled_min_centralizer(g, g.basis_indices("strict_lower"), samples=200)
    # gl_n attains n; the centre of sl_n is trivial here so sl_n attains its torus rank n - 1
    assert found == torus_rank(g)


def test_borel_nilradical_centralizer():
    b = construct("borel-of-gl", 3, 3)
    assert sampled_min_centralizer(b, b.basis_indices("strict_lower"), samples=200) == 3


def test_permuted_keeps_axioms():
    g = construct("sl", 3, 5)
    perm = np.random.default_rng(2).permutation(g.dim)
    h = g.permuted(perm)
    assert all(h.check_axioms().values())
    assert h.labels == tuple(g.labels[i] for i in perm)


def test_realization_closed_under_bracket():
    g = construct("sp", 2, 3)
    for i in range(g.dim):
        for j in range(g.dim):
            X, Y = g.realization[i], g.realization[j]
            C = (matmul(X, Y, 3) - matmul(Y, X, 3)) % 3
            assert np.array_equal(g.to_matrix(g.coords(C)), C)
