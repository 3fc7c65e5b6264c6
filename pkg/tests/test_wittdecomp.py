import itertools

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from wittforge.errors import BudgetExceeded, Degenerate, NotSingular
from wittforge.gf2k import GF
from wittforge.quadspace import (
    QuadraticSpace,
    change_basis,
    direct_sum,
    eval_beta,
    eval_q,
    hyperbolic_plane,
    norm_plane,
    random_invertible,
    span_rank,
    standard_space,
)
from wittforge.wittdecomp import (
    arf_defect,
    classical_arf,
    complete_hyperbolic_pair,
    defect_oracle,
    find_singular,
    hyperbolic_basis_search,
    symplectic_basis,
    witt_decompose,
)

seeds = st.integers(0, 2**32 - 1)


def singular_count_by_hand(S):
    F = S.field
    n = S.dim
    count = 0
    for c in itertools.product(range(F.order), repeat=n):
        v = S.vector(list(c))
        count += eval_q(S, v).is_zero()
    return count


def defect_by_count(S):
    """Defect from the classical singular-vector count of a 2m-dim space."""
    q, m = S.field.order, S.dim // 2
    plus = q ** (2 * m - 1) + q**m - q ** (m - 1)
    minus = q ** (2 * m - 1) - q**m + q ** (m - 1)
    c = singular_count_by_hand(S)
    assert c in (plus, minus)
    return 0 if c == plus else 1


@st.composite
def conjugated_spaces(draw, kmax=3, maxplanes=3):
    F = GF(draw(st.integers(1, kmax)))
    m = draw(st.integers(1, maxplanes))
    d = draw(st.integers(0, 1))
    S = standard_space(F, m - d, bool(d))
    M = random_invertible(F, S.dim, np.random.default_rng(draw(seeds)))
    return change_basis(S, M), d


# -- examples -------------------------------------------------------------

def test_find_singular_examples(F2, H2, N2):
    s = find_singular(H2)
    assert s is not None and not s.is_zero() and eval_q(H2, s).is_zero()
    assert find_singular(N2) is None
    S = change_basis(standard_space(F2, 2, False), random_invertible(F2, 4, np.random.default_rng(1)))
    s = find_singular(S)
    assert s is not None and not s.is_zero() and eval_q(S, s).is_zero()


def test_complete_hyperbolic_pair_examples(HH2, H2):
    e1 = H2.e(0)
    u, v = complete_hyperbolic_pair(H2, e1)
    assert u == e1 and eval_q(H2, v).is_zero() and eval_beta(H2, u, v).is_one()
    x = HH2.e(0) + HH2.e(2)
    u, v = complete_hyperbolic_pair(HH2, x)
    assert u == x
    assert eval_q(HH2, u).is_zero() and eval_q(HH2, v).is_zero() and eval_beta(HH2, u, v).is_one()
    with pytest.raises(NotSingular):
        complete_hyperbolic_pair(H2, H2.zero())
    with pytest.raises(NotSingular):
        complete_hyperbolic_pair(H2, H2.e(0) + H2.e(1))


def test_decompose_norm_sum(F2):
    dec = witt_decompose(standard_space(F2, 1, True))
    assert len(dec.hyperbolic_pairs) == 1
    assert dec.definite_residual is not None and dec.defect == 1


def test_decompose_conjugated_hh_over_gf4(F4):
    S = change_basis(standard_space(F4, 2, False), random_invertible(F4, 4, np.random.default_rng(7)))
    dec = witt_decompose(S)
    assert len(dec.hyperbolic_pairs) == 2 and dec.defect == 0
    assert defect_oracle(S) == 0


def test_defect_examples(F2, H2, N2):
    assert arf_defect(N2) == 1
    assert defect_oracle(H2) == 0
    assert defect_oracle(N2) == 1
    assert defect_oracle(direct_sum(H2, N2)) == 1
    assert arf_defect(QuadraticSpace(F2, [], [])) == 0


def test_random_dim4_gf2_defect_matches_count():
    F = GF(1)
    rng = np.random.default_rng(99)
    seen = set()
    for _ in range(40):
        d = int(rng.integers(2))
        S = change_basis(standard_space(F, 2 - d, bool(d)), random_invertible(F, 4, rng))
        assert arf_defect(S) == defect_oracle(S) == defect_by_count(S) == d
        seen.add(d)
    assert seen == {0, 1}


def test_degenerate_input_rejected(F2):
    S = QuadraticSpace(F2, [[0, 0], [0, 0]], [1, 1])
    with pytest.raises(Degenerate):
        witt_decompose(S)
    with pytest.raises(Degenerate):
        arf_defect(S)


def test_oracle_budget(F8):
    S = standard_space(F8, 4, False)
    with pytest.raises(BudgetExceeded):
        defect_oracle(S)
    assert arf_defect(S) == 0


def test_hyperbolic_basis_search(F2, H2, N2):
    assert hyperbolic_basis_search(N2) is None
    pairs = hyperbolic_basis_search(direct_sum(H2, H2))
    assert pairs is not None and len(pairs) == 2


def test_json_shape(F2):
    d = witt_decompose(standard_space(F2, 1, True)).to_json()
    assert d["defect"] == 1 and len(d["hyperbolic_pairs"]) == 1
    assert set(d["definite_residual"]) == {"x", "y", "b"}


# -- properties -----------------------------------------------------------

def _audit(dec):
    S = dec.space
    F = S.field
    B = dec.basis()
    assert len(B) == S.dim and span_rank(B) == S.dim
    blocks = [list(p) for p in dec.hyperbolic_pairs]
    for u, v in dec.hyperbolic_pairs:
        assert eval_q(S, u).is_zero() and eval_q(S, v).is_zero() and eval_beta(S, u, v).is_one()
    if dec.definite_residual is not None:
        x, y, b = dec.definite_residual
        assert eval_q(S, x).is_one() and eval_beta(S, x, y).is_one() and eval_q(S, y) == b
        assert b.trace() == 1
        blocks.append([x, y])
    for P, Q in itertools.combinations(blocks, 2):
        for a, c in itertools.product(P, Q):
            assert eval_beta(S, a, c) == F.zero


@given(conjugated_spaces())
def test_decomposition_audit_and_defect(data):
    S, d = data
    dec = witt_decompose(S)
    _audit(dec)
    assert dec.defect == d == arf_defect(S) == classical_arf(S)
    if S.field.order ** S.dim <= 4096:
        assert defect_oracle(S) == d


@given(conjugated_spaces(kmax=2, maxplanes=2))
def test_defect_matches_singular_count(data):
    S, d = data
    assert defect_by_count(S) == d


@given(conjugated_spaces(), seeds)
def test_defect_is_basis_invariant(data, seed):
    S, d = data
    T = change_basis(S, random_invertible(S.field, S.dim, np.random.default_rng(seed)))
    assert arf_defect(T) == arf_defect(S)


@given(conjugated_spaces(kmax=2, maxplanes=2))
def test_symplectic_basis_is_symplectic(data):
    S, _ = data
    pairs = symplectic_basis(S)
    flat = [w for p in pairs for w in p]
    assert span_rank(flat) == S.dim
    for i, (u, v) in enumerate(pairs):
        assert eval_beta(S, u, v).is_one()
        for j, (x, y) in enumerate(pairs):
            if i != j:
                assert not any(eval_beta(S, a, b) for a in (u, v) for b in (x, y))


@pytest.mark.parametrize("k", [1, 2, 3])
def test_every_trace_one_norm_plane_has_defect_one(k):
    F = GF(k)
    for b in F.elements():
        if b.trace() == 1:
            assert defect_oracle(norm_plane(F, b)) == 1 == arf_defect(norm_plane(F, b))


def test_exhaustive_gf2_dim4_against_count():
    F = GF(1)
    g = standard_space(F, 2, False)._g
    for q in itertools.product(range(2), repeat=4):
        S = QuadraticSpace(F, g, list(q))
        assert arf_defect(S) == defect_oracle(S) == defect_by_count(S)
    assert hyperbolic_plane(F).singular_count() == 3
