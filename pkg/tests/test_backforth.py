import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from wittforge.backforth import (
    PartialIso,
    Substructure,
    ef_game,
    empty_iso,
    extend_step,
    extend_to_full,
    generated_substructure,
)
from wittforge.errors import DefectObstruction, FieldMapObstruction, NotPartialIsometry
from wittforge.gf2k import GF
from wittforge.quadgeom import QuadraticGeometry
from wittforge.quadspace import (
    QuadraticSpace,
    change_basis,
    direct_sum,
    eval_q,
    hyperbolic_plane,
    norm_plane,
    random_invertible,
    random_vector,
    standard_space,
)

seeds = st.integers(0, 2**32 - 1)


def conj(S, seed):
    return change_basis(S, random_invertible(S.field, S.dim, np.random.default_rng(seed)))


# -- substructures --------------------------------------------------------

def test_empty_generators_give_prime_field(F4):
    sub = generated_substructure(standard_space(F4, 1, False))
    assert sub.subfield_degree == 1 and sub.vbasis == [] and sub.qbase is None
    assert sub.is_closed()


def test_singular_generator_stays_over_prime_field(F4):
    H = hyperbolic_plane(F4)
    sub = generated_substructure(H, [H.e(0)])
    assert sub.subfield_degree == 1 and sub.vbasis == [H.e(0)]
    assert sub.contains(H.e(0)) and not sub.contains(H.e(0).scale(F4.gen))


def test_closure_picks_up_field_values(F4):
    S = QuadraticSpace(F4, [[0, 1], [1, 0]], [F4.gen.value, 0])
    sub = generated_substructure(S, [S.e(0)])
    assert sub.subfield_degree == 2


def test_field_generator_enlarges_subfield(F4):
    sub = generated_substructure(hyperbolic_plane(F4), [F4.gen])
    assert sub.subfield_degree == 2
    assert all(sub.contains(a) for a in F4.elements())


# -- extension steps ------------------------------------------------------

def test_extend_empty_iso_by_singular_vector(HH2):
    f = empty_iso(HH2, HH2)
    e1 = HH2.e(0)
    g = extend_step(f, e1)
    assert g.audit()
    img = g.apply(e1)
    assert eval_q(HH2, img).is_zero() and not img.is_zero()
    assert extend_to_full(g).audit()


def test_extend_by_known_element_is_noop(HH2, F2):
    f = extend_step(empty_iso(HH2, HH2), HH2.e(0))
    assert extend_step(f, F2.one) is f
    assert extend_step(f, HH2.e(0)) is f


def test_defect_obstruction_needs_room(F2):
    M = QuadraticGeometry(standard_space(F2, 1, True))
    small = QuadraticGeometry(standard_space(F2, 1, False))
    big = QuadraticGeometry(standard_space(F2, 2, False))
    assert M.omega0 == 1
    e1 = M.space.e(0)  # singular for the base form
    f = extend_step(empty_iso(M, small), e1)
    with pytest.raises(DefectObstruction):
        extend_step(f, M.base)
    g = extend_step(extend_step(empty_iso(M, big), e1), M.base)
    assert g.audit() and big.omega_eval(g.qimage) == 1


def test_frobenius_twisted_map(F4):
    t = F4.gen
    S = QuadraticSpace(F4, [[0, 1], [1, 0]], [t.value, 0])
    w = S.e(0).scale(t * t)  # q(t^2 e1) = t^4 * t = t^2, the Frobenius image of t
    assert eval_q(S, w) == t * t
    f = PartialIso(Substructure(S, 2, [S.e(0)]), Substructure(S, 2, [w]), 1, [w])
    assert f.audit()
    g = extend_step(f, S.e(1))
    assert g.frobenius == 1 and g.audit()
    for v in S.vectors():
        gv = g.apply(v)
        assert eval_q(S, gv) == eval_q(S, v) ** 2
    h = g.inverse()
    assert h.audit() and h.apply(g.apply(S.e(1))) == S.e(1)


def test_incompatible_models_rejected(F2, F4):
    with pytest.raises(FieldMapObstruction):
        empty_iso(hyperbolic_plane(F2), hyperbolic_plane(F4))
    with pytest.raises(NotPartialIsometry):
        empty_iso(hyperbolic_plane(F2), QuadraticGeometry(hyperbolic_plane(F2)))
    with pytest.raises(NotPartialIsometry):
        empty_iso(QuadraticGeometry(hyperbolic_plane(F2)), QuadraticGeometry(hyperbolic_plane(F2), omega0=None))


@given(st.integers(1, 2), st.integers(1, 3), st.integers(0, 1), seeds)
def test_extend_step_preserves_old_map(k, m, d, seed):
    F = GF(k)
    S = standard_space(F, m - d, bool(d))
    M, N = conj(S, seed), conj(S, seed + 1)
    rng = np.random.default_rng(seed)
    f = empty_iso(M, N)
    for _ in range(3):
        c = random_vector(M, rng)
        g = extend_step(f, c, rng)
        for b, img in zip(f.source.vbasis, f.vimages):
            assert g.apply(b) == img
        assert g.audit()
        f = g


@given(st.integers(1, 2), st.integers(1, 2), seeds)
def test_geometry_maps_extend_to_full(k, m, seed):
    F = GF(k)
    G = QuadraticGeometry(conj(standard_space(F, m, False), seed))
    H = QuadraticGeometry(conj(standard_space(F, m, False), seed + 7))
    rng = np.random.default_rng(seed)
    f = empty_iso(G, H)
    f = extend_step(f, G.point(random_vector(G.space, rng)), rng)
    f = extend_to_full(f, rng)
    assert f.audit() and len(f.vimages) == G.dim
    for q in list(G.points())[:16]:
        p = f.apply(q)
        assert H.omega_eval(p) == G.omega_eval(q)
        for w in G.space.basis():
            assert H.eval_Q(p, f.apply(w)) == f.sigma(G.eval_Q(q, w))


# -- games ----------------------------------------------------------------

def test_zero_rounds_gives_empty_map(HH2):
    res = ef_game(HH2, HH2, 0)
    assert res.success and res.rounds_played == 0 and res.partial_iso.vimages == []


@pytest.mark.parametrize("adversary", ["random", "greedy_singular"])
@pytest.mark.parametrize("seed", range(10))
def test_same_model_three_rounds(HH2, seed, adversary):
    res = ef_game(HH2, HH2, 3, seed, adversary)
    assert res.success and res.partial_iso.audit()


def test_defect_distinguished_in_one_round(H2, N2):
    res = ef_game(H2, N2, 1, 0, "greedy_singular")
    assert not res.success and res.rounds_played == 1
    dist = res.distinguisher
    assert dist.side == "M" and "exists" in dist.formula


@pytest.mark.parametrize("seed", range(6))
def test_equal_invariants_survive(F2, seed):
    M = conj(standard_space(F2, 1, True), seed)
    N = conj(standard_space(F2, 1, True), seed + 100)
    assert ef_game(M, N, 3, seed).success
    assert ef_game(M, N, 3, seed, "greedy_singular").success


@pytest.mark.parametrize("seed", range(6))
def test_padding_with_hyperbolic_plane_keeps_success(F2, seed):
    H = hyperbolic_plane(F2)
    M = standard_space(F2, 1, False)
    N = conj(standard_space(F2, 1, False), seed)
    if ef_game(M, N, 2, seed).success:
        assert ef_game(direct_sum(M, H), direct_sum(N, H), 2, seed).success


def test_game_is_deterministic(F4):
    M = QuadraticGeometry(conj(standard_space(F4, 2, False), 1))
    N = QuadraticGeometry(conj(standard_space(F4, 2, False), 2))
    a = ef_game(M, N, 4, 7).to_json()
    b = ef_game(M, N, 4, 7).to_json()
    assert a == b and a["success"] and len(a["transcript"]) == 4


@pytest.mark.parametrize("seed", range(5))
def test_geometries_on_both_planes_are_indistinguishable(F2, seed):
    # each geometry holds forms of both defects, so the base labels do not matter
    M = QuadraticGeometry(norm_plane(F2))
    N = QuadraticGeometry(hyperbolic_plane(F2))
    assert M.omega0 != N.omega0
    res = ef_game(M, N, 2, seed)
    assert res.success and res.partial_iso.audit()
