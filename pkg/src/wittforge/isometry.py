"""Isometries between quadratic spaces: canonical forms, isometry tests and
extension of partial isometries (Witt's extension theorem, constructively).
"""

from __future__ import annotations

from typing import Sequence

import numpy as np

from . import linalg
from .errors import AuditFailure, Degenerate, DependentBasis, DimensionMismatch, MixedFields, NotPartialIsometry
from .gf2k import FieldElem, least_trace_one, solve_artin_schreier
from .quadspace import (
    QuadraticSpace,
    Vector,
    combine,
    random_vector,
    standard_space,
    theta,
)
from .wittdecomp import witt_decompose


class Isometry:
    """Linear map source -> target; ``columns[j]`` is the image of e_j."""

    def __init__(self, source: QuadraticSpace, target: QuadraticSpace, columns: Sequence[Vector]):
        if source.field != target.field:
            raise MixedFields(f"{source.field!r} vs {target.field!r}")
        if len(columns) != source.dim or source.dim != target.dim:
            raise DimensionMismatch("an isometry needs equal dimensions")
        self.source = source
        self.target = target
        self.columns = list(columns)

    @property
    def matrix(self) -> list[list[FieldElem]]:
        F = self.source.field
        n = self.source.dim
        return [[FieldElem(F, self.columns[j].values[i]) for j in range(n)] for i in range(n)]

    def _int_matrix(self) -> list[list[int]]:
        return linalg.transpose([c.values for c in self.columns]) if self.columns else []

    def __call__(self, v: Vector) -> Vector:
        return combine(self.source.field, v.values, self.columns, self.target.dim)

    def compose(self, other: Isometry) -> Isometry:
        """self after other."""
        return Isometry(other.source, self.target, [self(c) for c in other.columns])

    def inverse(self) -> Isometry:
        F = self.source.field
        n = self.source.dim
        inv = linalg.inverse(F, self._int_matrix()) if n else []
        if inv is None:
            raise AuditFailure("isometry matrix is singular")
        cols = linalg.transpose(inv) if n else []
        return Isometry(self.target, self.source, [Vector(F, c) for c in cols])

    def is_valid(self) -> bool:
        """Invertible and preserving q on the basis and on all pairwise sums."""
        S, T = self.source, self.target
        n = S.dim
        if n and linalg.rank(S.field, [c.values for c in self.columns]) != n:
            return False
        for i in range(n):
            if T.q_int(self.columns[i].values) != S._q[i]:
                return False
            for j in range(i + 1, n):
                if T.beta_int(self.columns[i].values, self.columns[j].values) != S._g[i][j]:
                    return False
        return True

    def audit(self, rng: np.random.Generator | None = None, samples: int = 100) -> bool:
        """Basis/pair check plus q-preservation on seeded random vectors."""
        if not self.is_valid():
            return False
        rng = rng if rng is not None else np.random.default_rng(0)
        for _ in range(samples):
            v = random_vector(self.source, rng)
            if self.target.q_int(self(v).values) != self.source.q_int(v.values):
                return False
        return True

    def to_json(self) -> dict:
        return {
            "source": self.source.to_json(),
            "target": self.target.to_json(),
            "matrix": [[c.bits() for c in row] for row in self.matrix],
        }

    def __repr__(self) -> str:
        return f"Isometry(dim={self.source.dim}, {self.source.field!r})"


def identity_isometry(S: QuadraticSpace) -> Isometry:
    return Isometry(S, S, S.basis())


def _from_basis(S: QuadraticSpace, T: QuadraticSpace, src: list[Vector], dst: list[Vector]) -> Isometry:
    """The linear map sending the basis ``src`` of S to ``dst`` in T."""
    F = S.field
    n = S.dim
    if n == 0:
        return Isometry(S, T, [])
    B = linalg.transpose([v.values for v in src])
    Binv = linalg.inverse(F, B)
    if Binv is None:
        raise DependentBasis("source vectors are not a basis")
    D = linalg.transpose([v.values for v in dst])
    M = linalg.matmul(F, D, Binv)
    return Isometry(S, T, [Vector(F, c) for c in linalg.transpose(M)])


def canonical_form(S: QuadraticSpace) -> tuple[Isometry, QuadraticSpace]:
    """Isometry onto the standard space of the same dimension and defect."""
    if not S.is_nondegenerate():
        raise Degenerate("canonical form needs a nondegenerate space")
    dec = witt_decompose(S)
    F = S.field
    T = standard_space(F, len(dec.hyperbolic_pairs), dec.defect == 1)
    basis = [w for pair in dec.hyperbolic_pairs for w in pair]
    if dec.definite_residual is not None:
        x, y, b = dec.definite_residual
        b0 = least_trace_one(F)
        # y' = c x + y has q(y') = c^2 + c + b, so pick c with c^2 + c = b + b0
        c = solve_artin_schreier(b + b0)
        if c is None:
            raise AuditFailure("trace(b) = trace(b0) = 1 must give a root")
        basis += [x, x.scale(c) + y]
    to_S = _from_basis(T, S, T.basis(), basis)
    phi = to_S.inverse()
    if not phi.is_valid():
        raise AuditFailure("canonical form is not an isometry")
    return phi, T


def is_isometric(S1: QuadraticSpace, S2: QuadraticSpace) -> Isometry | None:
    """An isometry S1 -> S2, or None when none exists."""
    if S1.field != S2.field:
        raise MixedFields(f"{S1.field!r} vs {S2.field!r}")
    if S1.dim != S2.dim:
        return None
    phi1, T1 = canonical_form(S1)
    phi2, T2 = canonical_form(S2)
    if T1 != T2:
        return None
    return phi2.inverse().compose(phi1)


# -- Witt extension ----------------------------------------------------

def _solve_affine_quadratic(
    T: QuadraticSpace,
    base: Vector,
    directions: list[Vector],
    target: int,
    rng: np.random.Generator,
    tries: int = 200,
) -> Vector | None:
    """Some y in base + span(directions) with q(y) = target.

    Random lines y0 + s z are tried first: along a line q is a quadratic
    in s that can be solved with a square root, a division or one
    Artin-Schreier step. Small cases fall back to exhaustive search.
    """
    F = T.field
    if T.q_int(base.values) == target:
        return base
    if not directions:
        return None
    mul = F.mul_int
    d = len(directions)
    for _ in range(tries):
        y0 = base + combine(F, [int(x) for x in rng.integers(0, F.order, size=d)], directions, T.dim)
        z = combine(F, [int(x) for x in rng.integers(0, F.order, size=d)], directions, T.dim)
        if z.is_zero():
            continue
        c = T.q_int(y0.values) ^ target  # need a s^2 + bb s = c
        a = T.q_int(z.values)
        bb = T.beta_int(y0.values, z.values)
        s = None
        if a == 0 and bb == 0:
            s = 0 if c == 0 else None
        elif a == 0:
            s = mul(c, F.inv_int(bb))
        elif bb == 0:
            s = FieldElem(F, mul(c, F.inv_int(a))).sqrt().value
        else:
            # s = (bb/a) u turns a s^2 + bb s = c into u^2 + u = c a / bb^2
            rhs = mul(mul(c, a), F.inv_int(mul(bb, bb)))
            u = F.solve_as_int(rhs)
            if u is not None:
                s = mul(mul(bb, F.inv_int(a)), u)
        if s is not None:
            y = y0 + z.scale(s)
            if T.q_int(y.values) == target:
                return y
    if F.order ** d <= 1 << 16:
        for idx in range(F.order ** d):
            coeffs = []
            for _ in range(d):
                idx, r = divmod(idx, F.order)
                coeffs.append(r)
            y = base + combine(F, coeffs, directions, T.dim)
            if T.q_int(y.values) == target:
                return y
    return None


def _check_partial(S: QuadraticSpace, T: QuadraticSpace, dom: list[Vector], img: list[Vector]) -> None:
    if len(dom) != len(img):
        raise DimensionMismatch("domain and image lists differ in length")
    if not theta(dom):
        raise DependentBasis("domain list must be independent")
    for i in range(len(dom)):
        if S.q_int(dom[i].values) != T.q_int(img[i].values):
            raise NotPartialIsometry(f"q differs on domain vector {i}")
        for j in range(i + 1, len(dom)):
            if S.beta_int(dom[i].values, dom[j].values) != T.beta_int(img[i].values, img[j].values):
                raise NotPartialIsometry(f"beta differs on domain vectors {i}, {j}")
    if not theta(img):
        raise NotPartialIsometry("image list is dependent")


def _linear_solutions(T: QuadraticSpace, constraints: list[tuple[Vector, int]]) -> tuple[Vector, list[Vector]] | None:
    """Affine space {y : beta(y, c) = value for each (c, value)} as (base, directions)."""
    F = T.field
    rows = [T.functional(c) for c, _ in constraints]
    rhs = [val for _, val in constraints]
    x = linalg.solve(F, rows, rhs, T.dim)
    if x is None:
        return None
    dirs = [Vector(F, z) for z in linalg.nullspace(F, rows, T.dim)]
    return Vector(F, x), dirs


def witt_extend(
    S: QuadraticSpace,
    dom: Sequence[Vector],
    img: Sequence[Vector],
    target: QuadraticSpace | None = None,
    rng: np.random.Generator | None = None,
) -> Isometry:
    """Extend the partial isometry dom[i] -> img[i] to an isometry S -> target.

    ``target`` defaults to S. Radical directions of span(dom) are first
    paired with partners on both sides, which makes the domain
    nondegenerate; the orthogonal complements are then matched through
    their canonical forms.
    """
    T = S if target is None else target
    if S.field != T.field:
        raise MixedFields(f"{S.field!r} vs {T.field!r}")
    if not S.is_nondegenerate() or not T.is_nondegenerate():
        raise Degenerate("Witt extension needs nondegenerate spaces")
    if S.dim != T.dim:
        raise DimensionMismatch("source and target dimensions differ")
    dom, img = list(dom), list(img)
    _check_partial(S, T, dom, img)
    rng = rng if rng is not None else np.random.default_rng(0)
    F = S.field

    # rebase the domain so the radical of span(dom) comes first
    U = S.restrict(dom)
    rad = U.radical()
    rest = [Vector(F, e) for e in linalg.complete_basis(F, [r.values for r in rad], len(dom))]
    local = rad + rest
    D = [combine(F, c.values, dom, S.dim) for c in local]
    Dp = [combine(F, c.values, img, T.dim) for c in local]
    n_rad = len(rad)

    for i in range(n_rad):
        r, rp = D[i], Dp[i]
        others = [j for j in range(len(D)) if j != i]
        cons = [(r, 1)] + [(D[j], 0) for j in others]
        base, _ = _linear_solutions(S, cons)
        y = base
        if S.q_int(r.values) == 0:
            y = y + r.scale(S.q_int(y.values))
        cons_p = [(rp, 1)] + [(Dp[j], 0) for j in others]
        sol = _linear_solutions(T, cons_p)
        if sol is None:
            raise AuditFailure("image constraints are inconsistent")
        yp = _solve_affine_quadratic(T, sol[0], sol[1], S.q_int(y.values), rng)
        if yp is None:
            raise AuditFailure("no partner found for a radical direction on the image side")
        D.append(y)
        Dp.append(yp)

    P = S.perp_any(D)
    Pp = T.perp_any(Dp)
    h = is_isometric(S.restrict(P), T.restrict(Pp)) if P else None
    if P and h is None:
        raise AuditFailure("orthogonal complements are not isometric")
    src = D + P
    dst = Dp + ([combine(F, c.values, Pp, T.dim) for c in h.columns] if P else [])
    iso = _from_basis(S, T, src, dst)
    if not iso.is_valid():
        raise AuditFailure("extension is not an isometry")
    for a, b in zip(dom, img):
        if iso(a) != b:
            raise AuditFailure("extension does not agree with the partial map")
    return iso
