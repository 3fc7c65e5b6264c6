import itertools

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from wittforge.battery import random_self_isometry
from wittforge.errors import Degenerate, DependentBasis, NotPartialIsometry
from wittforge.gf2k import GF
from wittforge.isometry import canonical_form, identity_isometry, is_isometric, witt_extend
from wittforge.quadspace import (
    QuadraticSpace,
    change_basis,
    eval_beta,
    eval_q,
    norm_plane,
    random_invertible,
    random_vector,
    standard_space,
    theta,
)
from wittforge.wittdecomp import arf_defect

seeds = st.integers(0, 2**32 - 1)


def brute_isometric_dim2(S, T):
    """Search all 2x2 matrices for one carrying q_S to q_T."""
    F = S.field
    for a, b, c, d in itertools.product(F.elements(), repeat=4):
        if (a * d + b * c).is_zero():
            continue
        u, v = T.vector([a, c]), T.vector([b, d])
        if eval_q(T, u) == eval_q(S, S.e(0)) and eval_q(T, v) == eval_q(S, S.e(1)) and eval_beta(T, u, v) == eval_beta(S, S.e(0), S.e(1)):
            return True
    return False


def assert_isometry(phi, samples=30, seed=0):
    S, T = phi.source, phi.target
    assert theta(phi.columns)
    for x, y in itertools.product(S.basis(), repeat=2):
        assert eval_beta(T, phi(x), phi(y)) == eval_beta(S, x, y)
    rng = np.random.default_rng(seed)
    for _ in range(samples):
        v = random_vector(S, rng)
        assert eval_q(T, phi(v)) == eval_q(S, v)


@st.composite
def spaces_with_defect(draw, kmax=3, maxplanes=3):
    F = GF(draw(st.integers(1, kmax)))
    m = draw(st.integers(1, maxplanes))
    d = draw(st.integers(0, 1))
    S = standard_space(F, m - d, bool(d))
    return change_basis(S, random_invertible(F, S.dim, np.random.default_rng(draw(seeds))))


# -- examples -------------------------------------------------------------

def test_standard_spaces_are_canonical(F2, F4):
    for S in (standard_space(F2, 2, False), standard_space(F4, 1, True)):
        phi, T = canonical_form(S)
        assert T.dim == S.dim
        assert_isometry(phi)


def test_conjugate_maps_back(F2):
    H = standard_space(F2, 2, False)
    S = change_basis(H, random_invertible(F2, 4, np.random.default_rng(5)))
    phi = is_isometric(S, H)
    assert phi is not None and phi.is_valid()
    assert_isometry(phi)


def test_norm_planes_with_different_b(F8):
    b0 = next(b for b in F8.elements() if b.trace() == 1)
    for b in F8.elements():
        if b.trace() == 1:
            phi = is_isometric(norm_plane(F8, b0), norm_plane(F8, b))
            assert phi is not None
            assert_isometry(phi)


def test_hyperbolic_vs_norm_plane(H2, N2):
    assert is_isometric(H2, N2) is None


def test_swapped_basis(H2):
    swapped = change_basis(H2, [[0, 1], [1, 0]])
    assert swapped == H2
    phi = is_isometric(H2, swapped)
    assert phi is not None
    assert_isometry(phi)


def test_two_random_defect_one_gf4_spaces(F4):
    rng = np.random.default_rng(11)
    base = standard_space(F4, 1, True)
    S = change_basis(base, random_invertible(F4, 4, rng))
    T = change_basis(base, random_invertible(F4, 4, rng))
    phi = is_isometric(S, T)
    assert phi is not None and phi.is_valid()
    phi.audit(rng)


def test_witt_extend_identity_on_pair(HH2):
    e1, e2 = HH2.e(0), HH2.e(1)
    phi = witt_extend(HH2, [e1, e2], [e1, e2])
    assert phi(e1) == e1 and phi(e2) == e2
    assert_isometry(phi)


def test_witt_extend_between_planes(HH2):
    e1, e3 = HH2.e(0), HH2.e(2)
    phi = witt_extend(HH2, [e1], [e3])
    assert phi(e1) == e3
    assert_isometry(phi)


def test_witt_extend_rejects_bad_maps(F2):
    S = standard_space(F2, 1, True)
    e1, e3 = S.e(0), S.e(2)  # q(e3) = 1 in the norm plane
    with pytest.raises(NotPartialIsometry):
        witt_extend(S, [e3], [e1])
    with pytest.raises(DependentBasis):
        witt_extend(S, [e1, e1], [e1, e1])
    with pytest.raises(Degenerate):
        witt_extend(QuadraticSpace(F2, [[0, 0], [0, 0]], [0, 0]), [], [])


def test_witt_extend_into_other_space(F4):
    rng = np.random.default_rng(2)
    S = change_basis(standard_space(F4, 2, False), random_invertible(F4, 4, rng))
    T = standard_space(F4, 2, False)
    u = next(v for v in S.vectors() if not v.is_zero() and eval_q(S, v).is_zero())
    phi = witt_extend(S, [u], [T.e(0)], target=T)
    assert phi(u) == T.e(0)
    assert_isometry(phi)


def test_identity_and_json(F2):
    S = standard_space(F2, 1, True)
    I = identity_isometry(S)
    assert all(I(v) == v for v in S.vectors())
    d = I.to_json()
    assert set(d) == {"source", "target", "matrix"}


# -- properties -----------------------------------------------------------

@pytest.mark.parametrize("k", [1, 2])
def test_dim2_classification_matches_brute_force(k):
    F = GF(k)
    spaces = []
    for g in range(1, F.order):
        for q in itertools.product(range(F.order), repeat=2):
            spaces.append(QuadraticSpace(F, [[0, g], [g, 0]], list(q)))
    rng = np.random.default_rng(k)
    picks = [spaces[i] for i in rng.choice(len(spaces), size=min(len(spaces), 12), replace=False)]
    for S, T in itertools.product(picks, repeat=2):
        phi = is_isometric(S, T)
        assert (phi is not None) == brute_isometric_dim2(S, T)
        if phi is not None:
            assert_isometry(phi, samples=5)


@given(spaces_with_defect(), spaces_with_defect())
def test_isometric_iff_same_defect(S, T):
    if S.field != T.field or S.dim != T.dim:
        return
    phi = is_isometric(S, T)
    assert (phi is not None) == (arf_defect(S) == arf_defect(T))
    if phi is not None:
        assert_isometry(phi, samples=10)


@given(spaces_with_defect(kmax=2, maxplanes=2), seeds)
def test_isometry_is_an_equivalence(S, seed):
    rng = np.random.default_rng(seed)
    T = change_basis(S, random_invertible(S.field, S.dim, rng))
    U = change_basis(T, random_invertible(S.field, S.dim, rng))
    assert is_isometric(S, S) is not None
    st_ = is_isometric(S, T)
    tu = is_isometric(T, U)
    assert st_ is not None and tu is not None
    assert_isometry(st_.inverse())
    assert_isometry(tu.compose(st_))


@given(spaces_with_defect(maxplanes=3), st.integers(1, 3), seeds)
def test_witt_extension_restricts_to_the_map(S, r, seed):
    rng = np.random.default_rng(seed)
    h = random_self_isometry(S, rng)
    dom = [random_vector(S, rng) for _ in range(r)]
    if not theta(dom):
        return
    img = [h(d) for d in dom]
    ext = witt_extend(S, dom, img, rng=rng)
    assert [ext(d) for d in dom] == img
    assert_isometry(ext, samples=10)
