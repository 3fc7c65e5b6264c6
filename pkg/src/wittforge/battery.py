"""The acceptance battery: ten exact checks shared by the test suite and the
``selftest`` subcommand. Each check returns a :class:`CheckResult`; the
``scale`` argument shrinks the seeded sample sizes for quick runs.
"""

from __future__ import annotations

import itertools
import time
from dataclasses import dataclass
from typing import Callable

import numpy as np

from . import linalg
from .backforth import ef_game, extend_to_full
from .errors import EvenDegreeForbidden, TooSmall
from .gf2k import GF, solve_artin_schreier
from .isometry import Isometry, is_isometric, witt_extend
from .quadgeom import QPoint, QuadraticGeometry, extend_scalars_geom
from .quadspace import (
    QuadraticSpace,
    Vector,
    change_basis,
    combine,
    norm_plane,
    random_invertible,
    random_vector,
    standard_space,
    theta,
)
from .termlang import REWRITE_RULES, Equal, ModelPool, equiv_oracle, is_normal, normalize_term, parse_term, random_term
from .wittdecomp import arf_defect, defect_oracle, witt_decompose


@dataclass
class CheckResult:
    number: int
    name: str
    passed: bool
    detail: str
    seconds: float = 0.0

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        return f"[{status}] criterion {self.number}: {self.name} ({self.detail}; {self.seconds:.1f}s)"


def _n(count: int, scale: float) -> int:
    return max(1, int(round(count * scale)))


def random_nondegenerate(F, n: int, rng: np.random.Generator) -> QuadraticSpace:
    """Random form with the standard gram, seen in a random basis."""
    S = QuadraticSpace(F, standard_space(F, n // 2, False)._g, [int(x) for x in rng.integers(0, F.order, size=n)])
    return change_basis(S, random_invertible(F, n, rng))


def random_self_isometry(S: QuadraticSpace, rng: np.random.Generator) -> Callable[[Vector], Vector]:
    """v -> M h(v), where h: S -> S in the basis given by M's columns."""
    M = random_invertible(S.field, S.dim, rng)
    h = is_isometric(S, change_basis(S, M))
    F = S.field
    return lambda v: Vector(F, linalg.matvec(F, M, h(v).values))


# -- 1 -----------------------------------------------------------------------

def check_wp_membership(scale: float = 1.0) -> CheckResult:
    bad = []
    for k in (1, 2, 3, 4):
        F = GF(k)
        image = {(x * x + x).value for x in F.elements()}
        for a in F.elements():
            if a.in_wp_image() != (a.value in image):
                bad.append((k, a.value))
        if len(image) * 2 != F.order:
            bad.append((k, "index"))
    return CheckResult(1, "AS-image membership by trace vs enumeration", not bad, f"{len(bad)} mismatches over k=1..4")


# -- 2 -----------------------------------------------------------------------

def _decomposition_ok(S: QuadraticSpace) -> bool:
    dec = witt_decompose(S)
    basis = dec.basis()
    if len(basis) != S.dim or not theta(basis):
        return False
    blocks = [list(p) for p in dec.hyperbolic_pairs]
    for u, v in dec.hyperbolic_pairs:
        if S.eval_q(u) or S.eval_q(v) or not S.eval_beta(u, v).is_one():
            return False
    if dec.definite_residual is not None:
        x, y, b = dec.definite_residual
        if not (S.eval_q(x).is_one() and S.eval_beta(x, y).is_one() and S.eval_q(y) == b and b.trace() == 1):
            return False
        blocks.append([x, y])
    for i, bi in enumerate(blocks):
        for bj in blocks[i + 1:]:
            if any(S.eval_beta(a, c) for a in bi for c in bj):
                return False
    return arf_defect(S) == defect_oracle(S) == dec.defect


def check_witt_decomposition(scale: float = 1.0, seed: int = 2) -> CheckResult:
    rng = np.random.default_rng(seed)
    F2 = GF(1)
    spaces = []
    for n in (2, 4):
        g = standard_space(F2, n // 2, False)._g
        for q in itertools.product(range(2), repeat=n):
            spaces.append(QuadraticSpace(F2, g, list(q)))
    for _ in range(_n(500, scale)):
        spaces.append(random_nondegenerate(F2, int(rng.choice([2, 4])), rng))
    for _ in range(_n(500, scale)):
        spaces.append(random_nondegenerate(GF(int(rng.choice([2, 3]))), int(rng.choice([2, 4, 6])), rng))
    bad = sum(1 for S in spaces if not _decomposition_ok(S))
    return CheckResult(2, "Witt decomposition audit and defect vs brute force", bad == 0, f"{len(spaces)} spaces, {bad} failures")


# -- 3 -----------------------------------------------------------------------

def _brute_isometric(S1: QuadraticSpace, S2: QuadraticSpace) -> bool:
    vecs = list(S2.vectors())
    q2 = [S2.q_int(v.values) for v in vecs]
    for i, c1 in enumerate(vecs):
        if q2[i] != S1._q[0]:
            continue
        for j, c2 in enumerate(vecs):
            if q2[j] == S1._q[1] and S2.beta_int(c1.values, c2.values) == S1._g[0][1] and theta([c1, c2]):
                return True
    return False


def check_isometry_classification(scale: float = 1.0, seed: int = 3) -> CheckResult:
    bad = 0
    pairs = 0
    for k in (1, 2):
        F = GF(k)
        planes = [
            QuadraticSpace(F, [[0, b], [b, 0]], [x, y])
            for b in range(1, F.order)
            for x in range(F.order)
            for y in range(F.order)
        ]
        for S1 in planes:
            for S2 in planes:
                pairs += 1
                iso = is_isometric(S1, S2)
                if (iso is not None) != _brute_isometric(S1, S2) or (iso is not None and not iso.is_valid()):
                    bad += 1
    rng = np.random.default_rng(seed)
    F2 = GF(1)
    for _ in range(_n(200, scale)):
        S1, S2 = random_nondegenerate(F2, 4, rng), random_nondegenerate(F2, 4, rng)
        pairs += 1
        iso = is_isometric(S1, S2)
        same = arf_defect(S1) == arf_defect(S2)
        if same != (iso is not None) or (iso is not None and not iso.audit(rng)):
            bad += 1
    return CheckResult(3, "isometry classification vs brute force", bad == 0, f"{pairs} pairs, {bad} disagreements")


# -- 4 -----------------------------------------------------------------------

def _random_domain(S: QuadraticSpace, r: int, degenerate: bool, rng: np.random.Generator) -> list[Vector]:
    while True:
        if not degenerate:
            dom = [random_vector(S, rng) for _ in range(r)]
        else:
            # build a beta-isotropic list, so span(dom) is degenerate
            dom = []
            for _ in range(r):
                perp = S.perp_any(dom) if dom else S.basis()
                c = [int(x) for x in rng.integers(0, S.field.order, size=len(perp))]
                dom.append(combine(S.field, c, perp, S.dim))
        if theta(dom):
            return dom


def check_witt_extension(scale: float = 1.0, seed: int = 4) -> CheckResult:
    rng = np.random.default_rng(seed)
    bad = degenerate_count = 0
    total = _n(500, scale)
    for trial in range(total):
        F = GF(1 + trial % 2)
        S = random_nondegenerate(F, 6, rng)
        g = random_self_isometry(S, rng)
        r = 1 + trial % 3
        dom = _random_domain(S, r, trial % 4 >= 2, rng)
        if not S.restrict(dom).is_nondegenerate():
            degenerate_count += 1
        img = [g(d) for d in dom]
        ext = witt_extend(S, dom, img, rng=rng)
        if not ext.audit(rng) or any(ext(a) != b for a, b in zip(dom, img)):
            bad += 1
    return CheckResult(
        4, "Witt extension of partial isometries", bad == 0, f"{total} maps ({degenerate_count} degenerate domains), {bad} failures"
    )


# -- 5 -----------------------------------------------------------------------

def _alternating_grams(F, n: int):
    idx = [(i, j) for i in range(n) for j in range(i + 1, n)]
    for vals in itertools.product(range(F.order), repeat=len(idx)):
        g = [[0] * n for _ in range(n)]
        for (i, j), x in zip(idx, vals):
            g[i][j] = g[j][i] = x
        if linalg.rank(F, g) == n:
            yield g


def check_omega_rebase(scale: float = 1.0) -> CheckResult:
    F = GF(1)
    bad = checked = 0
    for n in (2, 4):
        for g in _alternating_grams(F, n):
            for q0 in itertools.product(range(2), repeat=n):
                G = QuadraticGeometry(QuadraticSpace(F, g, list(q0)))
                pts = list(G.points())
                for p in pts:
                    if G.omega_eval(p) != arf_defect(G.form_of(p)):
                        bad += 1
                for base in pts:
                    G2 = G.rebase(base)
                    for p in pts:
                        checked += 1
                        if G2.omega_eval(QPoint(p.v + base.v)) != G.omega_eval(p):
                            bad += 1
    return CheckResult(5, "omega is independent of the base point", bad == 0, f"{checked} rebased values, {bad} mismatches")


# -- 6 -----------------------------------------------------------------------

def check_scalar_extension(scale: float = 1.0) -> CheckResult:
    F2, F4, F8 = GF(1), GF(2), GF(3)
    bad = 0
    notes = []
    for n in (2, 4):
        g = standard_space(F2, n // 2, False)._g
        for q0 in itertools.product(range(2), repeat=n):
            G = QuadraticGeometry(QuadraticSpace(F2, g, list(q0)))
            G8 = extend_scalars_geom(G, F8)
            for p in G.points():
                p8 = G8.extend_point(p, F8)
                if G8.omega_eval(p8) != G.omega_eval(p) or arf_defect(G8.form_of(p8)) != G.omega_eval(p):
                    bad += 1
            try:
                extend_scalars_geom(G, F4)
                bad += 1
                notes.append("even extension accepted")
            except EvenDegreeForbidden:
                pass
    plain = QuadraticGeometry(norm_plane(F2), omega0=None)
    P4 = extend_scalars_geom(plain, F4)
    t = F4.gen
    witness = Vector(F4, [t, F4.one])
    if P4.eval_Q(P4.base, witness) or P4.space.singular_count() <= 1:
        bad += 1
        notes.append("norm plane stayed definite")
    return CheckResult(6, "odd extensions keep omega, even ones are refused", bad == 0, f"{bad} failures" + ("; " + ", ".join(notes) if notes else ""))


# -- 7 -----------------------------------------------------------------------

def _subspaces_rank_le2(S: QuadraticSpace) -> list[list[Vector]]:
    seen = set()
    out = [[]]
    vecs = [v for v in S.vectors() if not v.is_zero()]
    for r in (1, 2):
        for combo in itertools.combinations(vecs, r):
            if not theta(list(combo)):
                continue
            red, _ = linalg.rref(S.field, [v.values for v in combo])
            key = tuple(map(tuple, red))
            if key not in seen:
                seen.add(key)
                out.append(list(combo))
    return out


def _span(G: QuadraticGeometry, U: list[Vector]) -> list[Vector]:
    F = G.field
    return [combine(F, c, U, G.dim) for c in itertools.product(range(F.order), repeat=len(U))]


def _has_hyperbolic_pair(G: QuadraticGeometry, q: QPoint, U: list[Vector]) -> bool:
    Fq = G.form_of(q)
    W = Fq.perp_any(U) if U else Fq.basis()
    Wsp = _span(G, W)
    sing = [w for w in Wsp if not w.is_zero() and Fq.q_int(w.values) == 0]
    return any(Fq.beta_int(a.values, b.values) == 1 for a in sing for b in sing)


def check_flip_defect(scale: float = 1.0) -> CheckResult:
    F = GF(1)
    g = standard_space(F, 2, False)._g
    bad = with_pair = impossible = 0
    total = 0
    for q0 in itertools.product(range(2), repeat=4):
        G = QuadraticGeometry(QuadraticSpace(F, g, list(q0)))
        subspaces = _subspaces_rank_le2(G.space)
        pts = list(G.points())
        for q in pts:
            for U in subspaces:
                total += 1
                span = _span(G, U)
                exists = any(
                    G.omega_eval(p) != G.omega_eval(q) and all(G.eval_Q_int(p, w) == G.eval_Q_int(q, w) for w in span)
                    for p in pts
                )
                pair = _has_hyperbolic_pair(G, q, U)
                with_pair += pair
                try:
                    p = G.flip_defect(q, U)
                except TooSmall:
                    if exists or pair:
                        bad += 1
                    impossible += 1
                    continue
                ok = G.omega_eval(p) != G.omega_eval(q) and all(G.eval_Q_int(p, w) == G.eval_Q_int(q, w) for w in span)
                if not ok:
                    bad += 1
    detail = (
        f"{total} (q, U) cases, {with_pair} with a hyperbolic pair in U-perp all flipped; "
        f"{impossible} cases where no flipping form exists (confirmed by brute force); {bad} failures"
    )
    return CheckResult(7, "defect flip keeping values on U", bad == 0, detail)


# -- 8 -----------------------------------------------------------------------

def check_normalizer(scale: float = 1.0, seed: int = 8) -> CheckResult:
    pool = ModelPool(seed)
    bad = 0
    count = _n(1000, scale)
    for sort in ("K", "V", "Q"):
        for s in range(count):
            t = random_term(sort, 5, seed * 100003 + s)
            n = normalize_term(t)
            if not is_normal(n) or normalize_term(n) != n:
                bad += 1
                continue
            if not isinstance(equiv_oracle(t, n, 50, s, pool), Equal):
                bad += 1
    rules_bad = [
        name
        for name, (lhs, rhs) in REWRITE_RULES.items()
        if not isinstance(equiv_oracle(parse_term(lhs), parse_term(rhs), 200, seed), Equal)
    ]
    bad += len(rules_bad)
    return CheckResult(
        8, "term normalizer is sound and reaches the atom normal form", bad == 0,
        f"{3 * count} terms + {len(REWRITE_RULES)} rules, {bad} failures" + (f" ({rules_bad})" if rules_bad else ""),
    )


# -- 9 -----------------------------------------------------------------------

def check_ef_games(scale: float = 1.0, seed: int = 9) -> CheckResult:
    F = GF(1)
    rng = np.random.default_rng(seed)
    games = _n(200, scale)
    bad = 0
    for n in (4, 6):
        for defect in (0, 1):
            M = standard_space(F, n // 2 - defect, bool(defect))
            N = change_basis(M, random_invertible(F, n, rng))
            for s in range(games):
                if not ef_game(M, N, 3, s).success:
                    bad += 1
    H = standard_space(F, 1, False)
    D = norm_plane(F)
    res = ef_game(H, D, 1, 0, adversary="greedy_singular")
    if res.success or res.rounds_played != 1:
        bad += 1
    G = QuadraticGeometry(standard_space(F, 2, False))
    for s in range(games):
        r = ef_game(G, G, 3, s)
        if not r.success:
            bad += 1
            continue
        full = extend_to_full(r.partial_iso)
        if not full.audit() or len(full.source.vbasis) != G.dim:
            bad += 1
    return CheckResult(9, "EF games: survival, distinguishing and homogeneity", bad == 0, f"{5 * games + 1} games, {bad} failures")


# -- 10 ----------------------------------------------------------------------

def check_norm_plane_shift(scale: float = 1.0) -> CheckResult:
    bad = pairs = 0
    for k in (1, 2, 3):
        F = GF(k)
        ones = [b for b in F.elements() if b.trace() == 1]
        for b in ones:
            for b2 in ones:
                pairs += 1
                c = solve_artin_schreier(b + b2)
                brute = [x for x in F.elements() if x * x + x + b == b2]
                if c is None or c * c + c + b != b2 or not brute:
                    bad += 1
                    continue
                P, P2 = norm_plane(F, b), norm_plane(F, b2)
                # x -> x, y -> c x + y carries P onto P2's values
                direct = Isometry(P, P2, [P2.e(0), P2.e(0).scale(c) + P2.e(1)])
                iso = is_isometric(P, P2)
                if iso is None or not iso.is_valid() or not direct.is_valid():
                    bad += 1
    return CheckResult(10, "norm planes with trace-one coefficients are isometric", bad == 0, f"{pairs} pairs, {bad} failures")


CHECKS = [
    check_wp_membership,
    check_witt_decomposition,
    check_isometry_classification,
    check_witt_extension,
    check_omega_rebase,
    check_scalar_extension,
    check_flip_defect,
    check_normalizer,
    check_ef_games,
    check_norm_plane_shift,
]


def run_check(fn, scale: float = 1.0) -> CheckResult:
    t0 = time.perf_counter()
    try:
        res = fn(scale=scale)
    except Exception as exc:  # a crashing check is a failing check
        num = CHECKS.index(fn) + 1 if fn in CHECKS else 0
        res = CheckResult(num, fn.__name__, False, f"raised {type(exc).__name__}: {exc}")
    res.seconds = time.perf_counter() - t0
    return res


def run_all(scale: float = 1.0, echo: Callable[[str], None] | None = None) -> list[CheckResult]:
    out = []
    for fn in CHECKS:
        res = run_check(fn, scale)
        if echo is not None:
            echo(res.line())
        out.append(res)
    return out
