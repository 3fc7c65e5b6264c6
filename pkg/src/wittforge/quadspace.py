"""Finite-dimensional quadratic spaces (V, q, beta) over GF(2^k).

A space is stored on a distinguished basis e_1..e_n by its Gram matrix
``gram[i][j] = beta(e_i, e_j)`` (symmetric, zero diagonal) and the values
``qdiag[i] = q(e_i)``. Evaluation uses

    q(sum a_i e_i) = sum a_i^2 q(e_i) + sum_{i<j} a_i a_j beta(e_i, e_j).

Degenerate and zero-dimensional spaces are allowed; operations that need
non-degeneracy check for it.
"""

from __future__ import annotations

from typing import Iterable, Iterator, Sequence

import numpy as np

from . import linalg
from .errors import DependentBasis, DimensionMismatch, Degenerate, MixedFields
from .gf2k import FieldElem, FiniteField, least_trace_one, norm_form_coefficient


class Vector:
    """Coordinate vector with entries in a finite field.

    Coordinates are held as packed ints; iterate (or use ``coords``) to get
    FieldElem entries.
    """

    __slots__ = ("field", "values")

    def __init__(self, field: FiniteField, values: Iterable):
        self.field = field
        vals = []
        for x in values:
            if isinstance(x, FieldElem):
                if x.field != field:
                    raise MixedFields(f"{x!r} is not in {field!r}")
                vals.append(x.value)
            else:
                vals.append(int(x))
        self.values = tuple(vals)

    @classmethod
    def _raw(cls, field: FiniteField, values: tuple) -> Vector:
        v = cls.__new__(cls)
        v.field = field
        v.values = values
        return v

    @classmethod
    def zero(cls, field: FiniteField, n: int) -> Vector:
        return cls._raw(field, (0,) * n)

    @classmethod
    def unit(cls, field: FiniteField, n: int, i: int) -> Vector:
        """The basis vector e_i (0-indexed)."""
        return cls._raw(field, tuple(1 if j == i else 0 for j in range(n)))

    @property
    def coords(self) -> list[FieldElem]:
        return [FieldElem(self.field, x) for x in self.values]

    def __len__(self) -> int:
        return len(self.values)

    def __iter__(self) -> Iterator[FieldElem]:
        return iter(self.coords)

    def __getitem__(self, i: int) -> FieldElem:
        return FieldElem(self.field, self.values[i])

    def _check(self, other: Vector) -> None:
        if not isinstance(other, Vector):
            raise TypeError(f"expected Vector, got {type(other).__name__}")
        if other.field != self.field:
            raise MixedFields(f"{self.field!r} vs {other.field!r}")
        if len(other.values) != len(self.values):
            raise DimensionMismatch(f"length {len(self.values)} vs {len(other.values)}")

    def __add__(self, other: Vector) -> Vector:
        self._check(other)
        return Vector._raw(self.field, tuple(a ^ b for a, b in zip(self.values, other.values)))

    __sub__ = __add__

    def __neg__(self) -> Vector:
        return self

    def scale(self, a: FieldElem | int) -> Vector:
        c = a.value if isinstance(a, FieldElem) else int(a)
        if isinstance(a, FieldElem) and a.field != self.field:
            raise MixedFields(f"{a!r} is not in {self.field!r}")
        mul = self.field.mul_int
        return Vector._raw(self.field, tuple(mul(c, x) for x in self.values))

    def __rmul__(self, a: FieldElem) -> Vector:
        if not isinstance(a, FieldElem):
            return NotImplemented
        return self.scale(a)

    def __eq__(self, other: object) -> bool:
        return isinstance(other, Vector) and self.values == other.values and self.field == other.field

    def __hash__(self) -> int:
        return hash(self.values)

    def __bool__(self) -> bool:
        return any(self.values)

    def is_zero(self) -> bool:
        return not any(self.values)

    def __repr__(self) -> str:
        return "Vector(" + ", ".join(str(c) for c in self.coords) + ")"

    def to_json(self) -> list[list[int]]:
        return [c.bits() for c in self.coords]

    @classmethod
    def from_json(cls, field: FiniteField, data: Sequence[Sequence[int]]) -> Vector:
        return cls(field, [field(bits) for bits in data])

    def sort_key(self) -> tuple:
        return tuple(FieldElem(self.field, x).sort_key() for x in self.values)


def _as_int(field: FiniteField, x) -> int:
    if isinstance(x, FieldElem):
        if x.field != field:
            raise MixedFields(f"{x!r} is not in {field!r}")
        return x.value
    return int(x)


class QuadraticSpace:
    """(V, q, beta) on the basis e_1..e_n; see the module docstring."""

    def __init__(self, field: FiniteField, gram, qdiag):
        self.field = field
        g = [[_as_int(field, x) for x in row] for row in gram]
        q = [_as_int(field, x) for x in qdiag]
        n = len(q)
        if len(g) != n or any(len(row) != n for row in g):
            raise DimensionMismatch(f"gram must be {n}x{n}")
        for i in range(n):
            if g[i][i] != 0:
                raise ValueError("gram must have zero diagonal (beta is alternating)")
            for j in range(i):
                if g[i][j] != g[j][i]:
                    raise ValueError("gram must be symmetric")
            for x in g[i] + [q[i]]:
                if not 0 <= x < field.order:
                    raise ValueError(f"entry {x} out of range for {field!r}")
        self._g = g
        self._q = q
        self.dim = n
        self._nondeg: bool | None = None

    # -- accessors ------------------------------------------------------
    @property
    def gram(self) -> list[list[FieldElem]]:
        return [[FieldElem(self.field, x) for x in row] for row in self._g]

    @property
    def qdiag(self) -> list[FieldElem]:
        return [FieldElem(self.field, x) for x in self._q]

    def __eq__(self, other: object) -> bool:
        return (
            isinstance(other, QuadraticSpace)
            and self.field == other.field
            and self._g == other._g
            and self._q == other._q
        )

    def __hash__(self) -> int:
        return hash((self.field, tuple(map(tuple, self._g)), tuple(self._q)))

    def __repr__(self) -> str:
        return f"QuadraticSpace({self.field!r}, dim={self.dim})"

    def vector(self, coords: Iterable) -> Vector:
        v = Vector(self.field, coords)
        self._check_vec(v)
        return v

    def e(self, i: int) -> Vector:
        """Basis vector e_i, 0-indexed."""
        return Vector.unit(self.field, self.dim, i)

    def basis(self) -> list[Vector]:
        return [self.e(i) for i in range(self.dim)]

    def zero(self) -> Vector:
        return Vector.zero(self.field, self.dim)

    def vectors(self) -> Iterator[Vector]:
        """All |K|^n vectors, first coordinate varying fastest."""
        order, n = self.field.order, self.dim
        for idx in range(order ** n):
            vals = []
            for _ in range(n):
                idx, r = divmod(idx, order)
                vals.append(r)
            yield Vector._raw(self.field, tuple(vals))

    def _check_vec(self, v: Vector) -> None:
        if not isinstance(v, Vector):
            raise TypeError(f"expected Vector, got {type(v).__name__}")
        if len(v.values) != self.dim:
            raise DimensionMismatch(f"vector of length {len(v.values)} in a space of dim {self.dim}")
        if v.field != self.field:
            raise MixedFields(f"{v.field!r} vs {self.field!r}")

    # -- evaluation -----------------------------------------------------
    def q_int(self, a: Sequence[int]) -> int:
        mul = self.field.mul_int
        g, q = self._g, self._q
        s = 0
        n = len(a)
        for i in range(n):
            ai = a[i]
            if not ai:
                continue
            if q[i]:
                s ^= mul(mul(ai, ai), q[i])
            row = g[i]
            for j in range(i + 1, n):
                if a[j] and row[j]:
                    s ^= mul(mul(ai, a[j]), row[j])
        return s

    def beta_int(self, a: Sequence[int], b: Sequence[int]) -> int:
        mul = self.field.mul_int
        s = 0
        for i, ai in enumerate(a):
            if not ai:
                continue
            row = self._g[i]
            t = 0
            for j, bj in enumerate(b):
                if bj and row[j]:
                    t ^= mul(row[j], bj)
            if t:
                s ^= mul(ai, t)
        return s

    def eval_q(self, v: Vector) -> FieldElem:
        self._check_vec(v)
        return FieldElem(self.field, self.q_int(v.values))

    def eval_beta(self, v: Vector, w: Vector) -> FieldElem:
        self._check_vec(v)
        self._check_vec(w)
        return FieldElem(self.field, self.beta_int(v.values, w.values))

    def functional(self, v: Vector) -> list[int]:
        """Row of beta(v, e_j) values, i.e. lambda_v on the basis."""
        mul = self.field.mul_int
        out = [0] * self.dim
        for i, ai in enumerate(v.values):
            if ai:
                row = self._g[i]
                for j in range(self.dim):
                    if row[j]:
                        out[j] ^= mul(ai, row[j])
        return out

    # -- structure ------------------------------------------------------
    def is_nondegenerate(self) -> bool:
        if self._nondeg is None:
            self._nondeg = self.dim == 0 or linalg.rank(self.field, self._g) == self.dim
        return self._nondeg

    def radical(self) -> list[Vector]:
        """Basis of rad(beta) = V^perp."""
        return [Vector._raw(self.field, tuple(x)) for x in linalg.nullspace(self.field, self._g, self.dim)]

    def perp_any(self, U: Sequence[Vector]) -> list[Vector]:
        """Basis of U^perp without a non-degeneracy requirement."""
        for u in U:
            self._check_vec(u)
        rows = [self.functional(u) for u in U]
        return [Vector._raw(self.field, tuple(x)) for x in linalg.nullspace(self.field, rows, self.dim)]

    def perp(self, U: Sequence[Vector]) -> list[Vector]:
        if not self.is_nondegenerate():
            raise Degenerate("perp needs a nondegenerate space")
        return self.perp_any(U)

    def theta(self, vs: Sequence[Vector]) -> bool:
        return theta(vs)

    def pi(self, vs: Sequence[Vector], w: Vector, i: int) -> FieldElem:
        return pi(vs, w, i)

    def restrict(self, U: Sequence[Vector]) -> QuadraticSpace:
        for u in U:
            self._check_vec(u)
        if not theta(U):
            raise DependentBasis("restrict needs an independent list")
        n = len(U)
        g = [[0] * n for _ in range(n)]
        for i in range(n):
            for j in range(i + 1, n):
                g[i][j] = g[j][i] = self.beta_int(U[i].values, U[j].values)
        return QuadraticSpace(self.field, g, [self.q_int(u.values) for u in U])

    def singular_count(self) -> int:
        """Number of vectors (including 0) with q(v) = 0, by enumeration."""
        return int(np.count_nonzero(q_values_array(self) == 0))

    def to_json(self) -> dict:
        return {
            "field": self.field.to_json(),
            "dim": self.dim,
            "gram": [[c.bits() for c in row] for row in self.gram],
            "qdiag": [c.bits() for c in self.qdiag],
        }

    @classmethod
    def from_json(cls, data: dict) -> QuadraticSpace:
        F = FiniteField.from_json(data["field"])
        gram = [[F(x) for x in row] for row in data["gram"]]
        qdiag = [F(x) for x in data["qdiag"]]
        n = data.get("dim", len(qdiag))
        if len(qdiag) != n:
            raise DimensionMismatch(f"dim {n} but {len(qdiag)} qdiag entries")
        return cls(F, gram, qdiag)


# -- module-level operations ------------------------------------------

def eval_q(S: QuadraticSpace, v: Vector) -> FieldElem:
    return S.eval_q(v)


def eval_beta(S: QuadraticSpace, v: Vector, w: Vector) -> FieldElem:
    return S.eval_beta(v, w)


def theta(vs: Sequence[Vector]) -> bool:
    """Linear independence of ``vs``."""
    if not vs:
        return True
    F = vs[0].field
    return linalg.rank(F, [v.values for v in vs]) == len(vs)


def pi(vs: Sequence[Vector], w: Vector, i: int) -> FieldElem:
    """Coordinate i (1-indexed) of w on the list vs; 0 when undefined."""
    F = w.field
    if not 1 <= i <= len(vs) or not theta(vs):
        return F.zero
    c = linalg.coordinates(F, [v.values for v in vs], w.values)
    if c is None:
        return F.zero
    return FieldElem(F, c[i - 1])


def is_nondegenerate(S: QuadraticSpace) -> bool:
    return S.is_nondegenerate()


def perp(S: QuadraticSpace, U: Sequence[Vector]) -> list[Vector]:
    return S.perp(U)


def restrict(S: QuadraticSpace, U: Sequence[Vector]) -> QuadraticSpace:
    return S.restrict(U)


def span_rank(vs: Sequence[Vector]) -> int:
    if not vs:
        return 0
    return linalg.rank(vs[0].field, [v.values for v in vs])


def in_span(vs: Sequence[Vector], w: Vector) -> bool:
    return linalg.coordinates(w.field, [v.values for v in vs], w.values) is not None


def coordinates_in(vs: Sequence[Vector], w: Vector) -> list[FieldElem] | None:
    c = linalg.coordinates(w.field, [v.values for v in vs], w.values)
    return None if c is None else [FieldElem(w.field, x) for x in c]


def combine(field: FiniteField, coeffs: Sequence, vs: Sequence[Vector], n: int) -> Vector:
    """sum coeffs_i * vs_i as a vector of length n."""
    mul = field.mul_int
    acc = [0] * n
    for c, v in zip(coeffs, vs):
        c = _as_int(field, c)
        if c:
            for j, x in enumerate(v.values):
                if x:
                    acc[j] ^= mul(c, x)
    return Vector._raw(field, tuple(acc))


def direct_sum(S1: QuadraticSpace, S2: QuadraticSpace) -> QuadraticSpace:
    if S1.field != S2.field:
        raise MixedFields(f"{S1.field!r} vs {S2.field!r}")
    n1, n2 = S1.dim, S2.dim
    g = [row + [0] * n2 for row in S1._g] + [[0] * n1 + row for row in S2._g]
    return QuadraticSpace(S1.field, g, S1._q + S2._q)


def hyperbolic_plane(field: FiniteField) -> QuadraticSpace:
    return QuadraticSpace(field, [[0, 1], [1, 0]], [0, 0])


def norm_plane(field: FiniteField, b: FieldElem | None = None) -> QuadraticSpace:
    """Definite plane q(x) = 1, q(y) = b, beta(x, y) = 1 (trace(b) must be 1)."""
    if b is None:
        b = least_trace_one(field)
    one, b = norm_form_coefficient(b)
    return QuadraticSpace(field, [[0, 1], [1, 0]], [one, b])


def standard_space(field: FiniteField, n_planes: int, with_norm_plane: bool) -> QuadraticSpace:
    """n_planes hyperbolic planes, plus a trailing norm plane when requested."""
    if n_planes < 0:
        raise ValueError("n_planes must be non-negative")
    S = QuadraticSpace(field, [], [])
    for _ in range(n_planes):
        S = direct_sum(S, hyperbolic_plane(field))
    if with_norm_plane:
        S = direct_sum(S, norm_plane(field))
    return S


def extend_scalars_space(S: QuadraticSpace, target: FiniteField) -> QuadraticSpace:
    emb = S.field.embedding_into(target)
    g = [[emb(x) for x in row] for row in S.gram]
    return QuadraticSpace(target, g, [emb(x) for x in S.qdiag])


def extend_vector(v: Vector, target: FiniteField) -> Vector:
    emb = v.field.embedding_into(target)
    return Vector(target, [emb(x) for x in v.coords])


def change_basis(S: QuadraticSpace, M: Sequence[Sequence]) -> QuadraticSpace:
    """The form on the new basis given by the columns of the invertible M."""
    F = S.field
    cols = linalg.transpose([[_as_int(F, x) for x in row] for row in M])
    return S.restrict([Vector._raw(F, tuple(c)) for c in cols])


def random_invertible(field: FiniteField, n: int, rng: np.random.Generator) -> list[list[int]]:
    while True:
        m = [[int(x) for x in rng.integers(0, field.order, size=n)] for _ in range(n)]
        if n == 0 or linalg.rank(field, m) == n:
            return m


def random_vector(S: QuadraticSpace, rng: np.random.Generator) -> Vector:
    return Vector._raw(S.field, tuple(int(x) for x in rng.integers(0, S.field.order, size=S.dim)))


def q_values_array(S: QuadraticSpace) -> np.ndarray:
    """q evaluated on every vector, in the order of ``S.vectors()``."""
    F = S.field
    order, n = F.order, S.dim
    if order ** n > 1 << 22:
        raise ValueError("space too large to enumerate")
    mul = F.mul_table()
    idx = np.arange(order ** n, dtype=np.int64)
    coords = [(idx // order ** i) % order for i in range(n)]
    sq = mul[np.arange(order), np.arange(order)]
    acc = np.zeros(order ** n, dtype=np.int64)
    g, q = S._g, S._q
    for i in range(n):
        if q[i]:
            acc ^= mul[sq[coords[i]], q[i]]
        for j in range(i + 1, n):
            if g[i][j]:
                acc ^= mul[mul[coords[i], coords[j]], g[i][j]]
    return acc
