"""Arithmetic in GF(2^k).

Elements are stored as ints holding their polynomial-basis coordinates
(bit i is the coefficient of t^i). A :class:`FiniteField` owns the modulus
and the lookup tables; a :class:`FieldElem` is an immutable (field, value)
pair with the usual operators.

Frobenius, trace and the Artin-Schreier map x -> x^2 + x are the tools
the rest of the package leans on: ``trace(a) == 0`` decides whether
``a`` lies in the image of the Artin-Schreier map.
"""

from __future__ import annotations

from functools import reduce
from math import gcd
from typing import Iterable, Iterator, Sequence

import numpy as np

from .errors import DivisionByZero, MixedFields, NotASubfield, NotIrreducible, Reducible

# Least irreducible polynomial of each degree, as an int (bit i = coeff of t^i).
DEFAULT_MODULI = {
    1: 0x3, 2: 0x7, 3: 0xB, 4: 0x13, 5: 0x25, 6: 0x43, 7: 0x83, 8: 0x11B,
    9: 0x203, 10: 0x409, 11: 0x805, 12: 0x1009, 13: 0x201B, 14: 0x4021,
    15: 0x8003, 16: 0x1002B,
}

_TABLE_MAX_K = 16
_NUMPY_TABLE_MAX_K = 10


def _poly_mod(a: int, m: int) -> int:
    dm = m.bit_length() - 1
    while a and a.bit_length() - 1 >= dm:
        a ^= m << (a.bit_length() - 1 - dm)
    return a


def _clmul(a: int, b: int) -> int:
    r = 0
    while b:
        if b & 1:
            r ^= a
        a <<= 1
        b >>= 1
    return r


def is_irreducible(poly: int) -> bool:
    """Trial division by every polynomial of degree 1..deg/2."""
    k = poly.bit_length() - 1
    if k < 1:
        return False
    for d in range(1, k // 2 + 1):
        for q in range(1 << d, 1 << (d + 1)):
            if _poly_mod(poly, q) == 0:
                return False
    return True


def _bits_to_int(bits: Sequence[int]) -> int:
    v = 0
    for i, b in enumerate(bits):
        if b not in (0, 1):
            raise ValueError(f"bit arrays hold 0/1 entries, got {b!r}")
        v |= b << i
    return v


def _bit_reverse(x: int, width: int) -> int:
    r = 0
    for _ in range(width):
        r = (r << 1) | (x & 1)
        x >>= 1
    return r


class FiniteField:
    """GF(2^k) = F_2[t]/(modulus).

    ``modulus`` may be an int or a little-endian bit sequence of length k+1;
    it defaults to the least irreducible polynomial of degree k.
    """

    def __init__(self, k: int, modulus: int | Sequence[int] | None = None):
        if k < 1:
            raise ValueError("extension degree must be positive")
        if modulus is None:
            if k not in DEFAULT_MODULI:
                raise ValueError(f"no default modulus shipped for k={k}; pass one")
            poly = DEFAULT_MODULI[k]
        elif isinstance(modulus, int):
            poly = modulus
        else:
            poly = _bits_to_int(modulus)
        if poly.bit_length() - 1 != k:
            raise NotIrreducible(f"modulus has degree {poly.bit_length() - 1}, expected {k}")
        if not is_irreducible(poly):
            raise NotIrreducible(f"modulus {poly:#x} is reducible over GF(2)")
        self.k = k
        self.poly = poly
        self.order = 1 << k
        self._exp: list[int] | None = None
        self._log: list[int] | None = None
        self._np_mul: np.ndarray | None = None
        self._as_basis: list[tuple[int, int]] | None = None
        self._embeddings: dict[FiniteField, Embedding] = {}
        # trace is F_2-linear: precompute it on the basis t^i
        self._trace_mask = 0
        for i in range(k):
            if self._trace_int(1 << i):
                self._trace_mask |= 1 << i

    # -- identity -------------------------------------------------------
    def __eq__(self, other: object) -> bool:
        return isinstance(other, FiniteField) and self.poly == other.poly

    def __hash__(self) -> int:
        return hash(("GF2k", self.poly))

    def __repr__(self) -> str:
        return f"GF(2^{self.k})"

    @property
    def modulus(self) -> tuple[int, ...]:
        return tuple((self.poly >> i) & 1 for i in range(self.k + 1))

    # -- element construction ------------------------------------------
    def __call__(self, value: int | Sequence[int] | FieldElem) -> FieldElem:
        if isinstance(value, FieldElem):
            if value.field != self:
                raise MixedFields(f"{value!r} is not an element of {self!r}")
            return value
        if isinstance(value, (int, np.integer)):
            value = int(value)
            if not 0 <= value < self.order:
                raise ValueError(f"{value} is out of range for {self!r}")
            return FieldElem(self, value)
        bits = list(value)
        if len(bits) != self.k:
            raise ValueError(f"expected {self.k} bits, got {len(bits)}")
        return FieldElem(self, _bits_to_int(bits))

    @property
    def zero(self) -> FieldElem:
        return FieldElem(self, 0)

    @property
    def one(self) -> FieldElem:
        return FieldElem(self, 1)

    @property
    def gen(self) -> FieldElem:
        """The class of t."""
        return FieldElem(self, _poly_mod(2, self.poly))

    def elements(self) -> Iterator[FieldElem]:
        for v in range(self.order):
            yield FieldElem(self, v)

    def elements_lex(self) -> Iterator[FieldElem]:
        """Elements in lexicographic order of their little-endian coordinates."""
        for idx in range(self.order):
            yield FieldElem(self, _bit_reverse(idx, self.k))

    def to_json(self) -> dict:
        return {"k": self.k, "modulus": list(self.modulus)}

    @classmethod
    def from_json(cls, data: dict) -> FiniteField:
        modulus = data["modulus"]
        if len(modulus) != data["k"] + 1 or modulus[-1] != 1:
            raise ValueError("modulus must have length k+1 with leading coefficient 1")
        return cls(data["k"], modulus)

    # -- int-level arithmetic ------------------------------------------
    def _build_tables(self) -> None:
        n = self.order - 1
        for g in range(2, self.order) if self.order > 2 else [1]:
            exp = [0] * (2 * n)
            x = 1
            ok = True
            for i in range(n):
                if x == 1 and i > 0:
                    ok = False
                    break
                exp[i] = x
                x = _poly_mod(_clmul(x, g), self.poly)
            if ok and x == 1:
                break
        for i in range(n, 2 * n):
            exp[i] = exp[i - n]
        log = [0] * self.order
        for i in range(n):
            log[exp[i]] = i
        self._exp, self._log = exp, log

    def mul_int(self, a: int, b: int) -> int:
        if a == 0 or b == 0:
            return 0
        if self.k <= _TABLE_MAX_K:
            if self._exp is None:
                self._build_tables()
            return self._exp[self._log[a] + self._log[b]]
        return _poly_mod(_clmul(a, b), self.poly)

    def inv_int(self, a: int) -> int:
        if a == 0:
            raise DivisionByZero(f"0 has no inverse in {self!r}")
        if self.k <= _TABLE_MAX_K:
            if self._exp is None:
                self._build_tables()
            return self._exp[(self.order - 1 - self._log[a]) % (self.order - 1)]
        return self.pow_int(a, self.order - 2)

    def pow_int(self, a: int, n: int) -> int:
        r = 1
        while n:
            if n & 1:
                r = self.mul_int(r, a)
            a = self.mul_int(a, a)
            n >>= 1
        return r

    def frobenius_int(self, a: int, times: int = 1) -> int:
        for _ in range(times % self.k):
            a = self.mul_int(a, a)
        return a

    def _trace_int(self, a: int) -> int:
        s, x = 0, a
        for _ in range(self.k):
            s ^= x
            x = _poly_mod(_clmul(x, x), self.poly)
        return s

    def trace_int(self, a: int) -> int:
        return bin(a & self._trace_mask).count("1") & 1

    def mul_table(self) -> np.ndarray:
        """Full multiplication table as an ``order x order`` numpy array."""
        if self._np_mul is None:
            if self.k > _NUMPY_TABLE_MAX_K:
                raise ValueError(f"multiplication table too large for {self!r}")
            if self._exp is None:
                self._build_tables()
            n = self.order - 1
            exp = np.array(self._exp, dtype=np.int64)
            log = np.array(self._log, dtype=np.int64)
            idx = log[:, None] + log[None, :]
            table = exp[idx]
            table[0, :] = 0
            table[:, 0] = 0
            self._np_mul = table.astype(np.int32 if n < 2**31 else np.int64)
        return self._np_mul

    # -- Artin-Schreier -------------------------------------------------
    def _as_xor_basis(self) -> list[tuple[int, int]]:
        # reduced basis of the image of x -> x^2 + x, each tagged with a preimage
        if self._as_basis is None:
            basis: list[tuple[int, int]] = []
            for i in range(self.k):
                x = 1 << i
                img = self.mul_int(x, x) ^ x
                for v, pre in basis:
                    if img ^ v < img:
                        img ^= v
                        x ^= pre
                if img:
                    basis.append((img, x))
                    basis.sort(reverse=True)
            self._as_basis = basis
        return self._as_basis

    def solve_as_int(self, b: int) -> int | None:
        if self.k % 2 == 1:
            if self.trace_int(b):
                return None
            h, x = 0, b
            for _ in range((self.k + 1) // 2):
                h ^= x
                x = self.frobenius_int(x, 2)
            return h
        x = 0
        for v, pre in self._as_xor_basis():
            if b ^ v < b:
                b ^= v
                x ^= pre
        return x if b == 0 else None

    # -- subfields and embeddings ---------------------------------------
    def embedding_into(self, target: FiniteField) -> Embedding:
        if target.k % self.k != 0:
            raise NotASubfield(f"{self!r} does not embed in {target!r}")
        emb = self._embeddings.get(target)
        if emb is None:
            emb = Embedding(self, target)
            self._embeddings[target] = emb
        return emb


class FieldElem:
    """Immutable element of a :class:`FiniteField`."""

    __slots__ = ("field", "value")

    def __init__(self, field: FiniteField, value: int):
        self.field = field
        self.value = value

    def _check(self, other: FieldElem) -> None:
        if not isinstance(other, FieldElem):
            raise TypeError(f"cannot combine FieldElem with {type(other).__name__}")
        if other.field is not self.field and other.field != self.field:
            raise MixedFields(f"{self.field!r} vs {other.field!r}")

    def __add__(self, other: FieldElem) -> FieldElem:
        self._check(other)
        return FieldElem(self.field, self.value ^ other.value)

    __sub__ = __add__

    def __radd__(self, other):
        # lets sum() start from the int 0
        if isinstance(other, int) and other == 0:
            return self
        return NotImplemented

    def __neg__(self) -> FieldElem:
        return self

    def __mul__(self, other):
        if not isinstance(other, FieldElem):
            return NotImplemented
        self._check(other)
        return FieldElem(self.field, self.field.mul_int(self.value, other.value))

    def inv(self) -> FieldElem:
        return FieldElem(self.field, self.field.inv_int(self.value))

    def __truediv__(self, other: FieldElem) -> FieldElem:
        self._check(other)
        return self * other.inv()

    def __pow__(self, n: int) -> FieldElem:
        if n < 0:
            return self.inv() ** (-n)
        return FieldElem(self.field, self.field.pow_int(self.value, n))

    def __eq__(self, other: object) -> bool:
        return (
            isinstance(other, FieldElem)
            and self.value == other.value
            and (self.field is other.field or self.field == other.field)
        )

    def __hash__(self) -> int:
        return hash((self.field.poly, self.value))

    def __bool__(self) -> bool:
        return self.value != 0

    def __int__(self) -> int:
        return self.value

    def __repr__(self) -> str:
        return f"{self.field!r}({self})"

    def __str__(self) -> str:
        if self.value == 0:
            return "0"
        terms = []
        for i in reversed(range(self.field.k)):
            if (self.value >> i) & 1:
                terms.append("1" if i == 0 else "t" if i == 1 else f"t^{i}")
        return "+".join(terms)

    def bits(self) -> list[int]:
        return [(self.value >> i) & 1 for i in range(self.field.k)]

    def to_json(self) -> list[int]:
        return self.bits()

    def sort_key(self) -> tuple[int, ...]:
        return tuple(self.bits())

    def is_zero(self) -> bool:
        return self.value == 0

    def is_one(self) -> bool:
        return self.value == 1

    def frobenius(self, times: int = 1) -> FieldElem:
        return FieldElem(self.field, self.field.frobenius_int(self.value, times))

    def sqrt(self) -> FieldElem:
        return self.frobenius(self.field.k - 1)

    def trace(self) -> int:
        return self.field.trace_int(self.value)

    def in_wp_image(self) -> bool:
        return self.trace() == 0

    def degree(self) -> int:
        """Degree over GF(2) of the smallest subfield containing this element."""
        for d in range(1, self.field.k + 1):
            if self.field.k % d == 0 and self.frobenius(d) == self:
                return d
        raise AssertionError("unreachable: a^(2^k) = a")


# -- module-level functions --------------------------------------------

def inv(a: FieldElem) -> FieldElem:
    return a.inv()


def sqrt(a: FieldElem) -> FieldElem:
    """Square root, i.e. a^(2^(k-1)); total because finite fields are perfect."""
    return a.sqrt()


def trace(a: FieldElem) -> int:
    """Absolute trace to GF(2), returned as 0 or 1."""
    return a.trace()


def in_wp_image(a: FieldElem) -> bool:
    """Whether x^2 + x = a has a solution in the field of ``a``."""
    return a.in_wp_image()


def solve_artin_schreier(b: FieldElem) -> FieldElem | None:
    """A root of x^2 + x + b, or ``None`` when the polynomial is irreducible.

    Odd degree uses the half-trace; even degree reduces b against a cached
    basis of the (F_2-linear) image of x -> x^2 + x. The other root is x + 1.
    """
    x = b.field.solve_as_int(b.value)
    return None if x is None else FieldElem(b.field, x)


def least_trace_one(field: FiniteField) -> FieldElem:
    """The lexicographically least element of trace 1."""
    for a in field.elements_lex():
        if a.trace() == 1:
            return a
    raise AssertionError("the trace map is onto GF(2)")


def norm_form_coefficient(b: FieldElem) -> tuple[FieldElem, FieldElem]:
    """Coefficients (q(x), q(y)) = (1, b) of the norm form of GF(2^k)[t]/(t^2+t+b).

    With beta(x, y) = 1 these define a definite plane; requires trace(b) = 1.
    """
    if b.trace() == 0:
        raise Reducible(f"t^2 + t + {b} splits over {b.field!r}")
    return b.field.one, b


def subfield_contains(a: FieldElem, d: int) -> bool:
    return a.frobenius(d) == a


def subfield_degree(elements: Iterable[FieldElem], start: int = 1) -> int:
    """Degree of the subfield generated by ``elements`` over GF(2^start)."""
    return reduce(lambda d, a: d * a.degree() // gcd(d, a.degree()), elements, start)


class Embedding:
    """Ring embedding GF(2^k) -> GF(2^km).

    t is sent to the root of the source modulus whose coordinate vector is
    lexicographically least (a field embeds into itself by the identity);
    everything else follows by F_2-linearity.
    """

    def __init__(self, source: FiniteField, target: FiniteField):
        self.source = source
        self.target = target
        root = target.gen if source == target else None
        for r in () if root is not None else target.elements_lex():
            acc = target.zero
            for bit in reversed(source.modulus):
                acc = acc * r + (target.one if bit else target.zero)
            if acc.is_zero():
                root = r
                break
        if root is None:
            raise AssertionError("an irreducible of degree k has a root in GF(2^km)")
        self.root = root
        self._images = []
        x = target.one
        for _ in range(source.k):
            self._images.append(x.value)
            x = x * root

    def __call__(self, a: FieldElem) -> FieldElem:
        if a.field != self.source:
            raise MixedFields(f"{a!r} is not in {self.source!r}")
        v = 0
        for i, img in enumerate(self._images):
            if (a.value >> i) & 1:
                v ^= img
        return FieldElem(self.target, v)


def embed(a: FieldElem, target: FiniteField) -> FieldElem:
    return a.field.embedding_into(target)(a)


_FIELD_CACHE: dict[int, FiniteField] = {}


def GF(k: int) -> FiniteField:
    """Shared default-modulus field of order 2^k."""
    f = _FIELD_CACHE.get(k)
    if f is None:
        f = _FIELD_CACHE[k] = FiniteField(k)
    return f
