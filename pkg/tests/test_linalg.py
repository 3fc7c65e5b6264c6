import itertools

import numpy as np
from hypothesis import given
from hypothesis import strategies as st

from conftest import poly_mul_mod
from wittforge import linalg
from wittforge.gf2k import GF
from wittforge.quadspace import random_invertible


@st.composite
def matrices(draw, max_rows=4, max_cols=4, kmax=3):
    F = GF(draw(st.integers(1, kmax)))
    r = draw(st.integers(1, max_rows))
    c = draw(st.integers(1, max_cols))
    m = [[draw(st.integers(0, F.order - 1)) for _ in range(c)] for _ in range(r)]
    return F, m


def brute_rank(F, rows):
    """Size of the row span by enumeration, as a power of |F|."""
    ncols = len(rows[0])
    span = set()
    for coeffs in itertools.product(range(F.order), repeat=len(rows)):
        acc = [0] * ncols
        for a, row in zip(coeffs, rows):
            for j, x in enumerate(row):
                acc[j] ^= poly_mul_mod(a, x, F.poly)
        span.add(tuple(acc))
    r = 0
    while F.order ** r < len(span):
        r += 1
    return r


@given(matrices(max_rows=3, max_cols=3, kmax=2))
def test_rank_matches_enumeration(data):
    F, m = data
    assert linalg.rank(F, m) == brute_rank(F, m)


@given(matrices())
def test_nullspace_is_annihilated(data):
    F, m = data
    ncols = len(m[0])
    ns = linalg.nullspace(F, m, ncols)
    assert len(ns) + linalg.rank(F, m) == ncols
    for v in ns:
        assert linalg.matvec(F, m, v) == [0] * len(m)


@given(matrices(), st.data())
def test_solve_consistent_systems(data, draw):
    F, m = data
    ncols = len(m[0])
    x = [draw.draw(st.integers(0, F.order - 1)) for _ in range(ncols)]
    rhs = linalg.matvec(F, m, x)
    y = linalg.solve(F, m, rhs, ncols)
    assert y is not None and linalg.matvec(F, m, y) == rhs


def test_solve_inconsistent_returns_none():
    F = GF(1)
    assert linalg.solve(F, [[1, 1], [1, 1]], [0, 1], 2) is None


@given(st.integers(1, 3), st.integers(1, 4), st.integers(0, 2**32 - 1))
def test_inverse_round_trip(k, n, seed):
    F = GF(k)
    m = random_invertible(F, n, np.random.default_rng(seed))
    mi = linalg.inverse(F, m)
    assert linalg.matmul(F, m, mi) == linalg.identity(n)
    assert linalg.matmul(F, mi, m) == linalg.identity(n)


def test_singular_inverse_is_none():
    F = GF(2)
    # second row is t times the first
    assert linalg.inverse(F, [[1, 2], [2, F.mul_int(2, 2)]]) is None


def test_coordinates_and_completion():
    F = GF(2)
    basis = [[1, 0, 0], [0, 1, 1]]
    w = [2, 3, 3]
    c = linalg.coordinates(F, basis, w)
    assert c == [2, 3]
    assert linalg.coordinates(F, basis, [0, 0, 1]) is None
    extra = linalg.complete_basis(F, basis, 3)
    assert len(extra) == 1
    assert linalg.rank(F, basis + extra) == 3


def test_rref_pivots():
    F = GF(1)
    rows, piv = linalg.rref(F, [[0, 1, 1], [0, 1, 0]])
    assert piv == [1, 2]
    assert rows[0][1] == 1 and rows[1][2] == 1


def test_transpose():
    assert linalg.transpose([[1, 2, 3], [4, 5, 6]]) == [[1, 4], [2, 5], [3, 6]]
