"""Finitely generated substructures, partial isomorphisms and EF games.

Models are either quadratic spaces (language: field ops, vector ops,
theta, pi, beta, q) or quadratic geometries (field ops, vector ops, theta,
pi, beta_V, beta_Q, +_Q, -_Q and optionally omega).

A substructure over GF(2^k) is described by a subfield GF(2^d), a list of
vectors that is independent over the *whole* field (its GF(2^d)-span is the
vector part) and at most one base point (the Q part is its translates by
the vector part). Independence over K is what keeps every pi-value inside
GF(2^d). A partial isomorphism is a Frobenius power x -> x^(2^j) on the
subfield together with images of the basis vectors and the base point.
"""

from __future__ import annotations

from dataclasses import dataclass, field as dc_field
from math import gcd
from typing import Sequence, Union

import numpy as np

from . import linalg
from .errors import (
    AuditFailure,
    DefectObstruction,
    FieldMapObstruction,
    NoRoom,
    NotPartialIsometry,
    TooSmall,
)
from .gf2k import FieldElem, FiniteField
from .isometry import is_isometric, witt_extend
from .quadgeom import QPoint, QuadraticGeometry
from .quadspace import QuadraticSpace, Vector, combine, random_vector, theta

Model = Union[QuadraticSpace, QuadraticGeometry]
Element = Union[FieldElem, Vector, QPoint]

_EXHAUSTIVE_LIMIT = 1 << 16


def _lcm(a: int, b: int) -> int:
    return a * b // gcd(a, b)


def _space(model: Model) -> QuadraticSpace:
    return model.space if isinstance(model, QuadraticGeometry) else model


def _field(model: Model) -> FiniteField:
    return _space(model).field


def _is_geometry(model: Model) -> bool:
    return isinstance(model, QuadraticGeometry)


def _in_subfield(a: FieldElem, d: int) -> bool:
    return a.frobenius(d) == a


def _k_coords(B: Sequence[Vector], v: Vector) -> list[FieldElem] | None:
    F = v.field
    c = linalg.coordinates(F, [b.values for b in B], v.values)
    return None if c is None else [FieldElem(F, x) for x in c]


@dataclass
class Substructure:
    model: Model
    subfield_degree: int
    vbasis: list[Vector] = dc_field(default_factory=list)
    qbase: QPoint | None = None

    @property
    def field(self) -> FiniteField:
        return _field(self.model)

    @property
    def vector_dim(self) -> int:
        return len(self.vbasis)

    def values(self) -> list[FieldElem]:
        """Field values of all language functions on the generators."""
        S = _space(self.model)
        out = []
        for i, b in enumerate(self.vbasis):
            for c in self.vbasis[i + 1:]:
                out.append(S.eval_beta(b, c))
            if _is_geometry(self.model):
                if self.qbase is not None:
                    out.append(self.model.eval_Q(self.qbase, b))
            else:
                out.append(S.eval_q(b))
        return out

    def contains(self, x: Element) -> bool:
        d = self.subfield_degree
        if isinstance(x, FieldElem):
            return _in_subfield(x, d)
        if isinstance(x, QPoint):
            return self.qbase is not None and self.contains(x.v + self.qbase.v)
        c = _k_coords(self.vbasis, x)
        return c is not None and all(_in_subfield(a, d) for a in c)

    def is_closed(self) -> bool:
        if not theta(self.vbasis):
            return False
        return all(_in_subfield(a, self.subfield_degree) for a in self.values())

    def to_json(self) -> dict:
        return {
            "subfield_degree": self.subfield_degree,
            "vbasis": [v.to_json() for v in self.vbasis],
            "qbase": None if self.qbase is None else self.qbase.to_json(),
        }


def _close(sub: Substructure) -> Substructure:
    d = sub.subfield_degree
    while True:
        d2 = d
        for a in sub.values():
            d2 = _lcm(d2, a.degree())
        if d2 == d:
            break
        d = d2
        sub = Substructure(sub.model, d, sub.vbasis, sub.qbase)
    return Substructure(sub.model, d, sub.vbasis, sub.qbase)


def _add(sub: Substructure, x: Element) -> Substructure:
    """Least closed substructure containing sub and x."""
    d, B, qb = sub.subfield_degree, list(sub.vbasis), sub.qbase
    if isinstance(x, FieldElem):
        d = _lcm(d, x.degree())
    elif isinstance(x, QPoint):
        if qb is None:
            qb = x
        else:
            return _add(sub, x.v + qb.v)
    else:
        c = _k_coords(B, x)
        if c is None:
            B.append(x)
        else:
            for a in c:
                d = _lcm(d, a.degree())
    return _close(Substructure(sub.model, d, B, qb))


def generated_substructure(model: Model, generators: Sequence[Element] = ()) -> Substructure:
    sub = Substructure(model, 1)
    for g in generators:
        sub = _add(sub, g)
    return sub


def _twist(S: QuadraticSpace, j: int) -> QuadraticSpace:
    F = S.field
    return QuadraticSpace(F, [[F.frobenius_int(x, j) for x in row] for row in S._g], [F.frobenius_int(x, j) for x in S._q])


def _twist_vec(v: Vector, j: int) -> Vector:
    F = v.field
    return Vector(F, [F.frobenius_int(x, j) for x in v.values])


@dataclass
class PartialIso:
    source: Substructure
    target: Substructure
    frobenius: int = 0
    vimages: list[Vector] = dc_field(default_factory=list)
    qimage: QPoint | None = None

    @property
    def d(self) -> int:
        return self.source.subfield_degree

    def sigma(self, a: FieldElem) -> FieldElem:
        return a.frobenius(self.frobenius)

    def apply(self, x: Element) -> Element:
        if not self.source.contains(x):
            raise KeyError(f"{x!r} is outside the domain")
        if isinstance(x, FieldElem):
            return self.sigma(x)
        if isinstance(x, QPoint):
            return QPoint(self.qimage.v + self.apply(x.v + self.source.qbase.v))
        c = _k_coords(self.source.vbasis, x)
        F = x.field
        return combine(F, [self.sigma(a).value for a in c], self.vimages, _space(self.target.model).dim)

    def inverse(self) -> PartialIso:
        return PartialIso(
            self.target,
            self.source,
            (-self.frobenius) % self.d,
            list(self.source.vbasis),
            self.source.qbase,
        )

    def audit(self) -> bool:
        """Check the atomic diagram on generators and pairs of generators."""
        src, tgt = self.source, self.target
        M, N = src.model, tgt.model
        if src.subfield_degree != tgt.subfield_degree or not src.is_closed() or not tgt.is_closed():
            return False
        if tgt.vbasis != self.vimages or tgt.qbase != self.qimage:
            return False
        if (src.qbase is None) != (self.qimage is None):
            return False
        SM, SN = _space(M), _space(N)
        B, C = src.vbasis, self.vimages
        n = len(B)
        if len(C) != n or not theta(C):
            return False
        geo = _is_geometry(M)
        for i in range(n):
            for j in range(i + 1, n):
                if SN.eval_beta(C[i], C[j]) != self.sigma(SM.eval_beta(B[i], B[j])):
                    return False
                if not geo and SN.eval_q(C[i] + C[j]) != self.sigma(SM.eval_q(B[i] + B[j])):
                    return False
            if not geo and SN.eval_q(C[i]) != self.sigma(SM.eval_q(B[i])):
                return False
        if geo and src.qbase is not None:
            qa, qb = src.qbase, self.qimage
            for i in range(n):
                if N.eval_Q(qb, C[i]) != self.sigma(M.eval_Q(qa, B[i])):
                    return False
                if M.has_omega and M.omega_eval(M.q_act(qa, B[i])) != N.omega_eval(N.q_act(qb, C[i])):
                    return False
            if M.has_omega and M.omega_eval(qa) != N.omega_eval(qb):
                return False
        return True

    def to_json(self) -> dict:
        return {
            "frobenius": self.frobenius,
            "subfield_degree": self.d,
            "source": self.source.to_json(),
            "vimages": [v.to_json() for v in self.vimages],
            "qimage": None if self.qimage is None else self.qimage.to_json(),
        }


def empty_iso(M: Model, N: Model) -> PartialIso:
    if _field(M) != _field(N):
        raise FieldMapObstruction(f"models over {_field(M)!r} and {_field(N)!r}")
    if _is_geometry(M) != _is_geometry(N):
        raise NotPartialIsometry("models of different kinds")
    if _is_geometry(M) and M.has_omega != N.has_omega:
        raise NotPartialIsometry("geometries disagree on omega")
    return PartialIso(Substructure(M, 1), Substructure(N, 1))


def _extend_field(f: PartialIso, elems: Sequence[FieldElem]) -> PartialIso:
    d = f.d
    for a in elems:
        d = _lcm(d, a.degree())
    if d == f.d:
        return f
    # the subfield map x -> x^(2^j) extends unchanged since j < d divides into d'
    src = Substructure(f.source.model, d, f.source.vbasis, f.source.qbase)
    tgt = Substructure(f.target.model, d, f.target.vbasis, f.target.qbase)
    return PartialIso(src, tgt, f.frobenius, f.vimages, f.qimage)


def _forms(f: PartialIso) -> tuple[QuadraticSpace, QuadraticSpace] | None:
    """The quadratic forms whose values the map must respect, if any."""
    M, N = f.source.model, f.target.model
    if not _is_geometry(M):
        return M, N
    if f.source.qbase is None:
        return None
    return M.form_of(f.source.qbase), N.form_of(f.qimage)


def _search_image(
    SN: QuadraticSpace,
    form: QuadraticSpace | None,
    avoid: list[Vector],
    cons: list[tuple[Vector, int]],
    qtarget: int | None,
    rng: np.random.Generator,
) -> Vector:
    """A vector outside span(avoid) meeting linear constraints and a q-value."""
    F = SN.field
    rows = [SN.functional(c) for c, _ in cons]
    rhs = [val for _, val in cons]
    base = linalg.solve(F, rows, rhs, SN.dim)
    if base is None:
        raise NoRoom("the linear conditions have no solution")
    base = Vector(F, base)
    dirs = [Vector(F, z) for z in linalg.nullspace(F, rows, SN.dim)]

    def outside(v: Vector) -> bool:
        return _k_coords(avoid, v) is None

    candidates = [base] + [base + z for z in dirs]
    if not any(outside(v) for v in candidates):
        raise NoRoom("every solution lies in the span of the current domain")
    if form is None or qtarget is None:
        return next(v for v in candidates if outside(v))
    if F.order ** len(dirs) <= _EXHAUSTIVE_LIMIT:
        for idx in range(F.order ** len(dirs)):
            coeffs = []
            for _ in dirs:
                idx, r = divmod(idx, F.order)
                coeffs.append(r)
            v = base + combine(F, coeffs, dirs, SN.dim)
            if form.q_int(v.values) == qtarget and outside(v):
                return v
        raise DefectObstruction("no admissible vector has the required q-value")
    for _ in range(2000):
        v = base + combine(F, [int(x) for x in rng.integers(0, F.order, size=len(dirs))], dirs, SN.dim)
        if form.q_int(v.values) == qtarget and outside(v):
            return v
    raise DefectObstruction("random search found no admissible vector with the required q-value")


def _extend_vector(f: PartialIso, c: Vector, rng: np.random.Generator) -> PartialIso:
    M, N = f.source.model, f.target.model
    SM, SN = _space(M), _space(N)
    B = f.source.vbasis
    geo = _is_geometry(M)
    vals = [SM.eval_beta(c, b) for b in B]
    if not geo:
        vals.append(SM.eval_q(c))
    elif f.source.qbase is not None:
        vals.append(M.eval_Q(f.source.qbase, c))
    f = _extend_field(f, vals)
    j = f.frobenius
    forms = _forms(f)
    image = None
    if forms is not None:
        src_form, tgt_form = forms
        tw = _twist(src_form, j)
        if tw.dim == tgt_form.dim and is_isometric(tw, tgt_form) is not None:
            H = witt_extend(tw, [_twist_vec(b, j) for b in B], list(f.vimages), target=tgt_form, rng=rng)
            image = H(_twist_vec(c, j))
    if image is None:
        cons = [(fb, f.sigma(SM.eval_beta(c, b)).value) for b, fb in zip(B, f.vimages)]
        qt = None if forms is None else f.sigma(FieldElem(SM.field, forms[0].q_int(c.values))).value
        image = _search_image(SN, None if forms is None else forms[1], list(f.vimages), cons, qt, rng)
    src = _close(Substructure(M, f.d, B + [c], f.source.qbase))
    tgt = _close(Substructure(N, f.d, f.vimages + [image], f.qimage))
    if src.subfield_degree != f.d or tgt.subfield_degree != f.d:
        raise AuditFailure("closure grew after the field step")
    return PartialIso(src, tgt, j, f.vimages + [image], f.qimage)


def _extend_qpoint(f: PartialIso, c: QPoint) -> PartialIso:
    M, N = f.source.model, f.target.model
    B = f.source.vbasis
    f = _extend_field(f, [M.eval_Q(c, b) for b in B])
    targets = [f.sigma(M.eval_Q(c, b)) for b in B]
    q = N.realize_form(f.vimages, targets) if B else N.base
    if M.has_omega and N.omega_eval(q) != M.omega_eval(c):
        try:
            q = N.flip_defect(q, f.vimages)
        except TooSmall as exc:
            raise DefectObstruction(f"cannot match omega: {exc}") from exc
    src = Substructure(M, f.d, B, c)
    tgt = Substructure(N, f.d, f.vimages, q)
    return PartialIso(src, tgt, f.frobenius, f.vimages, q)


def extend_step(f: PartialIso, c: Element, rng: np.random.Generator | None = None) -> PartialIso:
    """Extend f so that c lies in its domain.

    Field elements enlarge the subfield; vectors in the K-span of the
    domain reduce to their coordinates; new vectors are placed by a
    Frobenius-twisted Witt extension when the relevant forms are
    isometric, and by direct search otherwise; points of Q go through their
    translate, or through form realization and a defect flip when Q is not
    yet in the domain.
    """
    rng = rng if rng is not None else np.random.default_rng(0)
    if f.source.contains(c):
        return f
    if isinstance(c, FieldElem):
        g = _extend_field(f, [c])
    elif isinstance(c, QPoint):
        if f.source.qbase is None:
            g = _extend_qpoint(f, c)
        else:
            g = extend_step(f, c.v + f.source.qbase.v, rng)
    else:
        coords = _k_coords(f.source.vbasis, c)
        if coords is not None:
            g = _extend_field(f, coords)
        else:
            g = _extend_vector(f, c, rng)
    if not g.audit():
        raise AuditFailure("extended map is not a partial isomorphism")
    return g


def extend_to_full(f: PartialIso, rng: np.random.Generator | None = None) -> PartialIso:
    """Extend f to the whole source model."""
    M = f.source.model
    S = _space(M)
    gens: list[Element] = [S.field.gen]
    if _is_geometry(M):
        gens.append(M.base)
    gens += S.basis()
    for g in gens:
        f = extend_step(f, g, rng)
    return f


# -- games ---------------------------------------------------------------

def element_to_json(x: Element) -> dict:
    if isinstance(x, FieldElem):
        return {"sort": "K", "value": x.to_json()}
    if isinstance(x, QPoint):
        return {"sort": "Q", "value": x.to_json()}
    return {"sort": "V", "value": x.to_json()}


@dataclass
class Distinguisher:
    side: str
    pebbles: list[dict]
    formula: str
    reason: str

    def to_json(self) -> dict:
        return {"side": self.side, "pebbles": self.pebbles, "formula": self.formula, "reason": self.reason}


@dataclass
class GameResult:
    rounds_played: int
    transcript: list[dict]
    partial_iso: PartialIso
    distinguisher: Distinguisher | None = None

    @property
    def success(self) -> bool:
        return self.distinguisher is None

    def to_json(self) -> dict:
        return {
            "success": self.success,
            "rounds_played": self.rounds_played,
            "transcript": self.transcript,
            "distinguisher": None if self.distinguisher is None else self.distinguisher.to_json(),
            "partial_iso": self.partial_iso.to_json(),
        }


def _lit(a: FieldElem) -> str:
    return "(lit " + " ".join(str(b) for b in a.bits()) + ")"


def _witness_formula(model: Model, history: list[tuple[str, Element]], c: Element) -> str:
    """Existential formula over the pebbles on one side that the new element satisfies."""
    names = []
    counts = {"K": 0, "V": 0, "Q": 0}
    for sort, _ in history:
        counts[sort] += 1
        names.append(f"{sort.lower()}x{counts[sort]}")
    sort = element_to_json(c)["sort"]
    new = f"{sort.lower()}x{counts[sort] + 1}"
    S = _space(model)
    atoms = []
    if isinstance(c, Vector):
        if _is_geometry(model):
            qs = [(n, x) for n, (s, x) in zip(names, history) if s == "Q"]
            for n, x in qs:
                atoms.append(f"(= (bQ {n} {new}) {_lit(model.eval_Q(x, c))})")
        else:
            atoms.append(f"(= (bQ qstar {new}) {_lit(S.eval_q(c))})")
        for n, (s, x) in zip(names, history):
            if s == "V":
                atoms.append(f"(= (bV {new} {n}) {_lit(S.eval_beta(c, x))})")
    elif isinstance(c, QPoint):
        for n, (s, x) in zip(names, history):
            if s == "V":
                atoms.append(f"(= (bQ {new} {n}) {_lit(model.eval_Q(c, x))})")
        if model.has_omega:
            atoms.append(f"(= (omega {new}) {model.omega_eval(c)})")
    else:
        atoms.append(f"(= {new} {_lit(c)})")
    return f"(exists {new} (and {' '.join(atoms)}))"


def _random_element(model: Model, rng: np.random.Generator) -> Element:
    S = _space(model)
    r = rng.random()
    if _is_geometry(model):
        if r < 0.15:
            return S.field(int(rng.integers(0, S.field.order)))
        if r < 0.4:
            return QPoint(random_vector(S, rng))
        return random_vector(S, rng)
    if r < 0.2:
        return S.field(int(rng.integers(0, S.field.order)))
    return random_vector(S, rng)


def _singular_candidates(model: Model, sub: Substructure) -> list[Vector]:
    S = _space(model)
    if _is_geometry(model):
        form = model.form_of(sub.qbase) if sub.qbase is not None else S
    else:
        form = S
    out = []
    for v in S.vectors():
        if v.is_zero() or form.q_int(v.values) != 0:
            continue
        if _k_coords(sub.vbasis, v) is None:
            out.append(v)
    return out


def _try(f: PartialIso, side: str, c: Element, rng: np.random.Generator) -> bool:
    try:
        if side == "M":
            extend_step(f, c, rng)
        else:
            extend_step(f.inverse(), c, rng)
        return True
    except (NoRoom, DefectObstruction, FieldMapObstruction):
        return False


def random_adversary(f: PartialIso, rng: np.random.Generator) -> tuple[str, Element]:
    side = "M" if rng.random() < 0.5 else "N"
    model = f.source.model if side == "M" else f.target.model
    return side, _random_element(model, rng)


def greedy_singular_adversary(f: PartialIso, rng: np.random.Generator) -> tuple[str, Element]:
    """Play a nonzero singular vector the other side cannot answer, if any."""
    first = None
    for side, sub in (("M", f.source), ("N", f.target)):
        for v in _singular_candidates(sub.model, sub):
            if first is None:
                first = (side, v)
            if not _try(f, side, v, np.random.default_rng(0)):
                return side, v
    if first is not None:
        return first
    return random_adversary(f, rng)


ADVERSARIES = {"random": random_adversary, "greedy_singular": greedy_singular_adversary}


def ef_game(M: Model, N: Model, rounds: int, seed: int = 0, adversary: str = "random") -> GameResult:
    """Play ``rounds`` rounds; the duplicator answers with extend_step."""
    rng = np.random.default_rng(seed)
    pick = ADVERSARIES[adversary]
    f = empty_iso(M, N)
    transcript: list[dict] = []
    hist = {"M": [], "N": []}
    for r in range(1, rounds + 1):
        side, c = pick(f, rng)
        sort = element_to_json(c)["sort"]
        try:
            if side == "M":
                g = extend_step(f, c, rng)
                resp = g.apply(c)
            else:
                h = extend_step(f.inverse(), c, rng)
                g = h.inverse()
                resp = h.apply(c)
        except (NoRoom, DefectObstruction, FieldMapObstruction) as exc:
            transcript.append({"round": r, "side": side, "element": element_to_json(c), "response": None})
            model = M if side == "M" else N
            dist = Distinguisher(
                side=side,
                pebbles=[{"side": s, **element_to_json(x)} for s in ("M", "N") for _, x in hist[s]],
                formula=_witness_formula(model, hist[side], c),
                reason=f"{type(exc).__name__}: {exc}",
            )
            return GameResult(r, transcript, f, dist)
        other = "N" if side == "M" else "M"
        hist[side].append((sort, c))
        hist[other].append((sort, resp))
        transcript.append({"round": r, "side": side, "element": element_to_json(c), "response": element_to_json(resp)})
        f = g
    return GameResult(rounds, transcript, f)
