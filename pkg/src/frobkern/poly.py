"""Sparse multivariate polynomials as ``{exponent tuple: coefficient}`` dicts.

Coefficients are Python ints; pass ``p`` to reduce.  Monomials of a fixed
degree are listed in lex-descending order (x1^d first), which together with
increasing degree gives the deg-lex order used for every monomial basis.
"""

from __future__ import annotations

from functools import lru_cache
from itertools import combinations

import numpy as np

Poly = dict


@lru_cache(maxsize=None)
def monomials(nvars: int, d: int) -> tuple[tuple[int, ...], ...]:
    if nvars == 0:
        return ((),) if d == 0 else ()
    out = []
    for e in range(d, -1, -1):
        for rest in monomials(nvars - 1, d - e):
            out.append((e,) + rest)
    return tuple(out)


@lru_cache(maxsize=None)
def monomial_index(nvars: int, d: int) -> dict:
    return {m: i for i, m in enumerate(monomials(nvars, d))}


def clean(f: Poly, p: int | None = None) -> Poly:
    if p is None:
        return {m: c for m, c in f.items() if c}
    return {m: c % p for m, c in f.items() if c % p}


def add(f: Poly, g: Poly, p: int | None = None) -> Poly:
    out = dict(f)
    for m, c in g.items():
        out[m] = out.get(m, 0) + c
    return clean(out, p)


def scale(f: Poly, c: int, p: int | None = None) -> Poly:
    return clean({m: c * v for m, v in f.items()}, p)


def mul(f: Poly, g: Poly, p: int | None = None) -> Poly:
    out: dict = {}
    for m1, c1 in f.items():
        for m2, c2 in g.items():
            m = tuple(a + b for a, b in zip(m1, m2))
            out[m] = out.get(m, 0) + c1 * c2
    return clean(out, p)


def power(f: Poly, k: int, nvars: int, p: int | None = None) -> Poly:
    out = constant(1, nvars)
    for _ in range(k):
        out = mul(out, f, p)
    return out


def constant(c: int, nvars: int) -> Poly:
    return {(0,) * nvars: c} if c else {}


def variable(i: int, nvars: int) -> Poly:
    e = [0] * nvars
    e[i] = 1
    return {tuple(e): 1}


def linear_form(coeffs, p: int | None = None) -> Poly:
    n = len(coeffs)
    out = {}
    for i, c in enumerate(coeffs):
        e = [0] * n
        e[i] = 1
        out[tuple(e)] = int(c)
    return clean(out, p)


def degree(f: Poly) -> int:
    return max((sum(m) for m in f), default=-1)


def is_homogeneous(f: Poly) -> bool:
    return len({sum(m) for m in f}) <= 1


def evaluate(f: Poly, point, p: int | None = None) -> int:
    total = 0
    for m, c in f.items():
        term = c
        for x, e in zip(point, m):
            if e:
                term *= int(x) ** e
        total += term
    return total % p if p is not None else total


def substitute(f: Poly, images: list[Poly], nvars: int, p: int | None = None) -> Poly:
    """Replace variable i by the polynomial images[i] (in ``nvars`` new variables)."""
    out: Poly = {}
    cache: dict = {}
    for m, c in f.items():
        term = constant(c, nvars)
        for i, e in enumerate(m):
            if e:
                key = (i, e)
                if key not in cache:
                    cache[key] = power(images[i], e, nvars, p)
                term = mul(term, cache[key], p)
        out = add(out, term, p)
    return out


def to_vector(f: Poly, nvars: int, d: int, p: int):
    """Coordinates of a homogeneous degree-d polynomial in the monomial basis."""
    idx = monomial_index(nvars, d)
    v = np.zeros(len(idx), dtype=np.int64)
    for m, c in f.items():
        if sum(m) != d:
            raise ValueError(f"monomial {m} is not of degree {d}")
        v[idx[m]] = c % p
    return v


def det(matrix: list[list[Poly]], nvars: int, p: int | None = None) -> Poly:
    """Determinant of a square matrix of polynomials (Laplace expansion, memoised on column sets)."""
    n = len(matrix)
    memo: dict = {}

    def minor(row: int, cols: frozenset) -> Poly:
        if row == n:
            return constant(1, nvars)
        key = (row, cols)
        if key in memo:
            return memo[key]
        acc: Poly = {}
        free = sorted(cols)
        for pos, c in enumerate(free):
            entry = matrix[row][c]
            if not entry:
                continue
            sub = minor(row + 1, cols - {c})
            if not sub:
                continue
            term = mul(entry, sub, p)
            acc = add(acc, term if pos % 2 == 0 else scale(term, -1, p), p)
        memo[key] = acc
        return acc

    return minor(0, frozenset(range(n)))


def principal_minor_sums(matrix: list[list[Poly]], nvars: int, p: int | None = None) -> list[Poly]:
    """[sum of k x k principal minors for k = 1..n]."""
    n = len(matrix)
    out = []
    for k in range(1, n + 1):
        acc: Poly = {}
        for S in combinations(range(n), k):
            sub = [[matrix[i][j] for j in S] for i in S]
            acc = add(acc, det(sub, nvars, p), p)
        out.append(acc)
    return out


__all__ = [
    "monomials", "monomial_index", "add", "mul", "scale", "power", "constant", "variable",
    "linear_form", "degree", "evaluate", "substitute", "to_vector", "det",
    "principal_minor_sums", "is_homogeneous",
]
