"""Witt decomposition and the Witt defect.

A nondegenerate quadratic space over a finite field of characteristic 2 is
an orthogonal sum of hyperbolic planes, possibly followed by one definite
plane. :func:`witt_decompose` finds such a splitting constructively and
:func:`defect_oracle` recomputes the defect bit by brute force.
"""

from __future__ import annotations

from functools import lru_cache
from dataclasses import dataclass, field as dc_field

import numpy as np

from .errors import AuditFailure, BudgetExceeded, Degenerate, DimensionTooSmall, NotSingular
from .gf2k import FieldElem, solve_artin_schreier
from . import linalg
from .quadspace import (
    QuadraticSpace,
    Vector,
    combine,
    coordinates_in,
    q_values_array,
    standard_space,
    theta,
)

ORACLE_BUDGET = 1 << 20


@dataclass
class WittDecomposition:
    space: QuadraticSpace
    hyperbolic_pairs: list[tuple[Vector, Vector]] = dc_field(default_factory=list)
    definite_residual: tuple[Vector, Vector, FieldElem] | None = None

    @property
    def defect(self) -> int:
        return 0 if self.definite_residual is None else 1

    def basis(self) -> list[Vector]:
        out = [w for pair in self.hyperbolic_pairs for w in pair]
        if self.definite_residual is not None:
            out += list(self.definite_residual[:2])
        return out

    def to_json(self) -> dict:
        res = None
        if self.definite_residual is not None:
            x, y, b = self.definite_residual
            res = {"x": x.to_json(), "y": y.to_json(), "b": b.to_json()}
        return {
            "hyperbolic_pairs": [[u.to_json(), v.to_json()] for u, v in self.hyperbolic_pairs],
            "definite_residual": res,
            "defect": self.defect,
        }


def _require_nondegenerate(S: QuadraticSpace) -> None:
    if not S.is_nondegenerate():
        raise Degenerate("the space is degenerate")


def _normalize(S: QuadraticSpace, x: Vector) -> Vector:
    """Scale x so that q(x) = 1; x must be nonsingular."""
    return x.scale(S.eval_q(x).sqrt().inv())


def _partner(S: QuadraticSpace, x: Vector, within: list[Vector] | None = None) -> Vector:
    """Some y (from ``within``, default the basis) scaled so beta(x, y) = 1."""
    for y in within if within is not None else S.basis():
        b = S.eval_beta(x, y)
        if b:
            return y.scale(b.inv())
    raise Degenerate("vector lies in the radical")


def find_singular(S: QuadraticSpace) -> Vector | None:
    """A nonzero singular vector, or None when S is a definite plane."""
    _require_nondegenerate(S)
    if S.dim < 2:
        raise DimensionTooSmall("need dim >= 2")
    basis = S.basis()
    for e in basis:
        if not S.eval_q(e):
            return e
    for i in range(S.dim):
        for j in range(i + 1, S.dim):
            w = basis[i] + basis[j]
            if not S.eval_q(w):
                return w
    x = _normalize(S, basis[0])
    if S.dim >= 4:
        # y orthogonal to x and independent of it; then q(x + y) = 1 + 1 = 0
        y = next(w for w in S.perp_any([x]) if theta([x, w]))
        if not S.eval_q(y):
            return y
        return x + _normalize(S, y)
    y = _partner(S, x)
    t = solve_artin_schreier(S.eval_q(y))
    if t is None:
        return None
    return x.scale(t) + y


def complete_hyperbolic_pair(S: QuadraticSpace, x: Vector) -> tuple[Vector, Vector]:
    _require_nondegenerate(S)
    if x.is_zero() or S.eval_q(x):
        raise NotSingular("x must be a nonzero singular vector")
    y = _partner(S, x)
    return x, y + x.scale(S.eval_q(y))


def witt_decompose(S: QuadraticSpace) -> WittDecomposition:
    _require_nondegenerate(S)
    F = S.field
    dec = WittDecomposition(S)
    W = S.basis()  # current subspace, in ambient coordinates
    while W:
        T = S.restrict(W)

        def lift(v: Vector) -> Vector:
            return combine(F, v.values, W, S.dim)

        s = find_singular(T)
        if s is None:
            x = _normalize(T, T.e(0))
            y = _partner(T, x)
            dec.definite_residual = (lift(x), lift(y), T.eval_q(y))
            break
        u, v = complete_hyperbolic_pair(T, s)
        dec.hyperbolic_pairs.append((lift(u), lift(v)))
        W = [lift(w) for w in T.perp_any([u, v])]
    _audit_decomposition(dec)
    return dec


def _audit_decomposition(dec: WittDecomposition) -> None:
    S = dec.space
    basis = dec.basis()
    if len(basis) != S.dim or not theta(basis):
        raise AuditFailure("decomposition vectors do not form a basis")
    blocks = [list(p) for p in dec.hyperbolic_pairs]
    for u, v in dec.hyperbolic_pairs:
        if S.eval_q(u) or S.eval_q(v) or not S.eval_beta(u, v).is_one():
            raise AuditFailure("bad hyperbolic pair")
    if dec.definite_residual is not None:
        x, y, b = dec.definite_residual
        if not (S.eval_q(x).is_one() and S.eval_beta(x, y).is_one() and S.eval_q(y) == b and b.trace() == 1):
            raise AuditFailure("bad definite residual")
        blocks.append([x, y])
    for i, bi in enumerate(blocks):
        for bj in blocks[i + 1:]:
            if any(S.eval_beta(a, c) for a in bi for c in bj):
                raise AuditFailure("blocks are not orthogonal")


def symplectic_basis(S: QuadraticSpace) -> list[tuple[Vector, Vector]]:
    """Pairs (u_i, v_i) with beta(u_i, v_i) = 1 and all other products 0."""
    _require_nondegenerate(S)
    rest = S.basis()
    pairs = []
    while rest:
        u = rest.pop(0)
        k = next(i for i, w in enumerate(rest) if S.eval_beta(u, w))
        w = rest.pop(k)
        v = w.scale(S.eval_beta(u, w).inv())
        rest = [r + u.scale(S.eval_beta(r, v)) + v.scale(S.eval_beta(r, u)) for r in rest]
        pairs.append((u, v))
    return pairs


def classical_arf(S: QuadraticSpace) -> int:
    """trace(sum q(u_i) q(v_i)) over a symplectic basis."""
    total = S.field.zero
    for u, v in symplectic_basis(S):
        total = total + S.eval_q(u) * S.eval_q(v)
    return total.trace()


def arf_defect(S: QuadraticSpace) -> int:
    """Witt defect bit: 0 iff S is an orthogonal sum of hyperbolic planes."""
    _require_nondegenerate(S)
    if S.dim == 0:
        return 0
    d = witt_decompose(S).defect
    if d != classical_arf(S):
        raise AuditFailure("Witt decomposition and symplectic Arf sum disagree")
    return d


# -- brute force -------------------------------------------------------

def _enumerate_subspace(S: QuadraticSpace, W: list[Vector]):
    """Coordinates (as an index array) and q-values of every vector of span(W)."""
    T = S.restrict(W)
    return T, q_values_array(T)


def _functional_values(S: QuadraticSpace, u: Vector, W: list[Vector]) -> np.ndarray:
    F = S.field
    order, d = F.order, len(W)
    mul = F.mul_table()
    idx = np.arange(order ** d, dtype=np.int64)
    acc = np.zeros(order ** d, dtype=np.int64)
    for i, w in enumerate(W):
        c = S.eval_beta(u, w).value
        if c:
            acc ^= mul[(idx // order ** i) % order, c]
    return acc


def _index_to_vector(S: QuadraticSpace, W: list[Vector], idx: int) -> Vector:
    order = S.field.order
    coeffs = []
    for _ in W:
        idx, r = divmod(idx, order)
        coeffs.append(r)
    return combine(S.field, coeffs, W, S.dim)


def hyperbolic_basis_search(S: QuadraticSpace) -> list[tuple[Vector, Vector]] | None:
    """Backtracking search for a basis of hyperbolic pairs; None if there is none.

    Each level picks a singular line, then a partner making a hyperbolic
    plane, and recurses on the plane's perp. Planes already tried at a
    level are skipped.
    """
    _require_nondegenerate(S)
    if S.field.order ** S.dim > ORACLE_BUDGET:
        raise BudgetExceeded(f"{S.field.order}^{S.dim} vectors exceed the brute-force budget")

    def search(W: list[Vector]) -> list[tuple[Vector, Vector]] | None:
        if not W:
            return []
        T, qv = _enumerate_subspace(S, W)
        tried: set = set()
        for iu in np.flatnonzero(qv == 0):
            iu = int(iu)
            if iu == 0:
                continue
            u = _index_to_vector(S, W, iu)
            lead = next(x for x in u.values if x)
            if lead != 1:
                continue  # one representative per line
            bu = _functional_values(S, u, W)
            for iv in np.flatnonzero((qv == 0) & (bu == 1)):
                v = _index_to_vector(S, W, int(iv))
                plane = _plane_key(S, u, v)
                if plane in tried:
                    continue
                tried.add(plane)
                found = search(_intersect(S, W, [u, v]))
                if found is not None:
                    return [(u, v)] + found
        return None

    return search(S.basis())


def _plane_key(S: QuadraticSpace, u: Vector, v: Vector) -> tuple:
    red, _ = linalg.rref(S.field, [u.values, v.values])
    return tuple(map(tuple, red))


def _intersect(S: QuadraticSpace, W: list[Vector], pair: list[Vector]) -> list[Vector]:
    """Basis of span(W) intersected with pair^perp, in ambient coordinates."""
    T = S.restrict(W)
    local = [Vector(S.field, coordinates_in(W, p)) for p in pair]
    return [combine(S.field, w.values, W, S.dim) for w in T.perp_any(local)]


@lru_cache(maxsize=None)
def _hyperbolic_count(field, n_planes: int) -> int:
    return standard_space(field, n_planes, False).singular_count()


def hyperbolic_singular_count(S: QuadraticSpace) -> int:
    """Singular-vector count of the hyperbolic space of the same size."""
    return _hyperbolic_count(S.field, S.dim // 2)


def defect_oracle(S: QuadraticSpace) -> int:
    """Witt defect by brute force.

    A full hyperbolic basis forces the singular-vector count of the
    standard hyperbolic space, so a count mismatch already proves defect 1;
    otherwise the backtracking search decides.
    """
    _require_nondegenerate(S)
    if S.field.order ** S.dim > ORACLE_BUDGET:
        raise BudgetExceeded(f"{S.field.order}^{S.dim} vectors exceed the brute-force budget")
    if S.dim == 0:
        return 0
    if S.singular_count() != hyperbolic_singular_count(S):
        return 1
    return 0 if hyperbolic_basis_search(S) is not None else 1
