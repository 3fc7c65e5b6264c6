"""Quadratic geometries (V, K, Q).

Q is the set of quadratic forms on V whose polar form is the fixed
alternating form beta_V. V acts regularly on Q by

    (q + v)(w) = q(w) + beta_V(v, w)^2,

so every point is a translate of a base form q0 and is stored as that
translate. The optional omega bit labels the two Witt-defect classes.
"""

from __future__ import annotations

from typing import Iterator, Sequence

from . import linalg
from .errors import (
    Degenerate,
    DependentBasis,
    DimensionMismatch,
    DimensionTooSmall,
    EvenDegreeForbidden,
    NotASubfield,
    OmegaAbsent,
    TooSmall,
)
from .gf2k import FieldElem, FiniteField, least_trace_one
from .quadspace import QuadraticSpace, Vector, combine, extend_scalars_space, extend_vector, theta
from .wittdecomp import arf_defect, complete_hyperbolic_pair, find_singular


class QPoint:
    """The form v +_Q q0, identified by its translate v."""

    __slots__ = ("v",)

    def __init__(self, v: Vector):
        self.v = v

    def __eq__(self, other: object) -> bool:
        return isinstance(other, QPoint) and self.v == other.v

    def __hash__(self) -> int:
        return hash(("Q", self.v.values))

    def __repr__(self) -> str:
        return f"QPoint({self.v!r})"

    def to_json(self) -> list[list[int]]:
        return self.v.to_json()


class QuadraticGeometry:
    """Three-sorted structure built on a nondegenerate space.

    ``q0diag`` defaults to the space's own qdiag. ``omega0="auto"`` sets the
    defect bit of q0 to its Witt defect; ``None`` gives the variant without
    omega; 0 or 1 sets it explicitly.
    """

    def __init__(self, space: QuadraticSpace, q0diag: Sequence | None = None, omega0: int | str | None = "auto"):
        if space.dim == 0:
            raise DimensionTooSmall("geometries need dim >= 2")
        if q0diag is not None:
            if len(q0diag) != space.dim:
                raise DimensionMismatch("q0diag length must equal dim")
            space = QuadraticSpace(space.field, space._g, list(q0diag))
        if not space.is_nondegenerate():
            raise Degenerate("beta_V must be nondegenerate")
        self.space = space
        self.field = space.field
        self.dim = space.dim
        if omega0 == "auto":
            omega0 = arf_defect(space)
        if omega0 not in (0, 1, None):
            raise ValueError("omega0 must be 0, 1, None or 'auto'")
        self.omega0 = omega0

    @property
    def q0diag(self) -> list[FieldElem]:
        return self.space.qdiag

    @property
    def has_omega(self) -> bool:
        return self.omega0 is not None

    def __repr__(self) -> str:
        return f"QuadraticGeometry({self.field!r}, dim={self.dim}, omega0={self.omega0})"

    def __eq__(self, other: object) -> bool:
        return isinstance(other, QuadraticGeometry) and self.space == other.space and self.omega0 == other.omega0

    def __hash__(self) -> int:
        return hash((self.space, self.omega0))

    # -- points ---------------------------------------------------------
    @property
    def base(self) -> QPoint:
        return QPoint(self.space.zero())

    def point(self, v: Vector) -> QPoint:
        self.space._check_vec(v)
        return QPoint(v)

    def points(self) -> Iterator[QPoint]:
        for v in self.space.vectors():
            yield QPoint(v)

    def _check_point(self, q: QPoint) -> None:
        if not isinstance(q, QPoint):
            raise TypeError(f"expected QPoint, got {type(q).__name__}")
        self.space._check_vec(q.v)

    # -- operations -----------------------------------------------------
    def q_act(self, q: QPoint, w: Vector) -> QPoint:
        self._check_point(q)
        self.space._check_vec(w)
        return QPoint(q.v + w)

    def q_diff(self, q1: QPoint, q2: QPoint) -> Vector:
        """The unique v with q2 +_Q v = q1."""
        self._check_point(q1)
        self._check_point(q2)
        return q1.v + q2.v

    def eval_Q_int(self, q: QPoint, w: Vector) -> int:
        S = self.space
        b = S.beta_int(q.v.values, w.values)
        return S.q_int(w.values) ^ self.field.mul_int(b, b)

    def eval_Q(self, q: QPoint, w: Vector) -> FieldElem:
        self._check_point(q)
        self.space._check_vec(w)
        return FieldElem(self.field, self.eval_Q_int(q, w))

    def form_of(self, q: QPoint) -> QuadraticSpace:
        """The point q as a quadratic space on the same basis."""
        self._check_point(q)
        return QuadraticSpace(self.field, self.space._g, [self.eval_Q_int(q, e) for e in self.space.basis()])

    def omega_eval(self, q: QPoint) -> int:
        if not self.has_omega:
            raise OmegaAbsent("this geometry carries no omega")
        self._check_point(q)
        same = FieldElem(self.field, self.space.q_int(q.v.values)).in_wp_image()
        return self.omega0 if same else 1 - self.omega0

    def rebase(self, q: QPoint) -> QuadraticGeometry:
        """The same geometry with base form q (omega carried over)."""
        om = self.omega_eval(q) if self.has_omega else None
        return QuadraticGeometry(self.form_of(q), omega0=om)

    # -- constructions --------------------------------------------------
    def realize_form(self, U: Sequence[Vector], targets: Sequence[FieldElem]) -> QPoint:
        """A point whose values on U are ``targets``."""
        U = list(U)
        if len(U) != len(targets):
            raise DimensionMismatch("one target value per vector in U")
        for u in U:
            self.space._check_vec(u)
        if not theta(U):
            raise DependentBasis("U must be independent")
        F = self.field
        S = self.space
        lam = []
        for u, t in zip(U, targets):
            t = F(t)
            lam.append((t + FieldElem(F, S.q_int(u.values))).sqrt().value)
        rows = [S.functional(u) for u in U]
        x = linalg.solve(F, rows, lam, S.dim)
        if x is None:
            raise Degenerate("linear system for the translate is inconsistent")
        return QPoint(Vector(F, x))

    def flip_defect(self, q: QPoint, U: Sequence[Vector]) -> QPoint:
        """A point agreeing with q on span(U) whose omega is flipped.

        Adding v in U^perp leaves the values on U alone and flips omega
        exactly when q(v) has trace 1. A hyperbolic pair (w, w') for q inside
        U^perp gives v = a w + w' with q(v) = a for the least trace-one a;
        otherwise any w in U^perp with q(w) = c != 0 is rescaled so that
        q(v) = a. If q vanishes on all of U^perp no flip exists.
        """
        if not self.has_omega:
            raise OmegaAbsent("this geometry carries no omega")
        self._check_point(q)
        U = list(U)
        for u in U:
            self.space._check_vec(u)
        F = self.field
        Fq = self.form_of(q)
        W = Fq.perp_any(U) if U else Fq.basis()
        a = least_trace_one(F)
        v = self._flip_vector(Fq, W, a)
        if v is None:
            raise TooSmall("the form vanishes identically on the orthogonal complement of U")
        return QPoint(q.v + v)

    @staticmethod
    def _flip_vector(Fq: QuadraticSpace, W: list[Vector], a: FieldElem) -> Vector | None:
        F = Fq.field
        if not W:
            return None
        Wsp = Fq.restrict(W)
        n = Fq.dim

        def lift(x: Vector) -> Vector:
            return combine(F, x.values, W, n)

        # nondegenerate part of U^perp: complement of its radical
        rad = Wsp.radical()
        comp = [Vector(F, e) for e in linalg.complete_basis(F, [r.values for r in rad], Wsp.dim)]
        if len(comp) >= 2:
            C = Wsp.restrict(comp)
            s = find_singular(C)
            if s is not None:
                w, w2 = complete_hyperbolic_pair(C, s)
                w = combine(F, w.values, comp, Wsp.dim)
                w2 = combine(F, w2.values, comp, Wsp.dim)
                return lift(w.scale(a) + w2)
        candidates = list(Wsp.basis())
        d = Wsp.dim
        candidates += [Wsp.e(i) + Wsp.e(j) for i in range(d) for j in range(i + 1, d)]
        for x in candidates:
            c = Wsp.eval_q(x)
            if c:
                return lift(x.scale((a / c).sqrt()))
        return None

    def extend_scalars(self, target: FiniteField) -> QuadraticGeometry:
        return extend_scalars_geom(self, target)

    def extend_point(self, q: QPoint, target: FiniteField) -> QPoint:
        return QPoint(extend_vector(q.v, target))

    def to_json(self) -> dict:
        d = self.space.to_json()
        d["q0diag"] = [c.bits() for c in self.q0diag]
        d["omega0"] = self.omega0
        return d

    @classmethod
    def from_json(cls, data: dict) -> QuadraticGeometry:
        S = QuadraticSpace.from_json(data)
        q0 = [S.field(x) for x in data["q0diag"]] if "q0diag" in data else None
        om = data.get("omega0", "auto")
        return cls(S, q0, om)


# -- module-level operations ------------------------------------------

def q_act(G: QuadraticGeometry, q: QPoint, w: Vector) -> QPoint:
    return G.q_act(q, w)


def q_diff(G: QuadraticGeometry, q1: QPoint, q2: QPoint) -> Vector:
    return G.q_diff(q1, q2)


def eval_Q(G: QuadraticGeometry, q: QPoint, w: Vector) -> FieldElem:
    return G.eval_Q(q, w)


def omega_eval(G: QuadraticGeometry, q: QPoint) -> int:
    return G.omega_eval(q)


def realize_form(G: QuadraticGeometry, U: Sequence[Vector], targets: Sequence[FieldElem]) -> QPoint:
    return G.realize_form(U, targets)


def flip_defect(G: QuadraticGeometry, q: QPoint, U: Sequence[Vector]) -> QPoint:
    return G.flip_defect(q, U)


def extend_scalars_geom(G: QuadraticGeometry, target: FiniteField) -> QuadraticGeometry:
    """Scalar extension; with omega only odd-degree extensions are allowed."""
    k, m = G.field.k, target.k
    if m % k != 0:
        raise NotASubfield(f"{G.field!r} does not embed in {target!r}")
    if G.has_omega and (m // k) % 2 == 0:
        raise EvenDegreeForbidden("even-degree extensions merge the two omega classes")
    return QuadraticGeometry(extend_scalars_space(G.space, target), omega0=G.omega0)
