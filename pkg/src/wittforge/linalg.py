"""Gaussian elimination over GF(2^k).

Everything here works on plain ints (packed field values) and lists of
rows, with the field passed in for multiplication and inversion. Higher
layers wrap the results in FieldElem/Vector objects.
"""

from __future__ import annotations

from typing import Sequence

from .gf2k import FiniteField

Row = list[int]


def rref(F: FiniteField, rows: Sequence[Sequence[int]]) -> tuple[list[Row], list[int]]:
    """Reduced row echelon form; returns (nonzero rows, pivot columns)."""
    m = [list(r) for r in rows]
    if not m:
        return [], []
    ncols = len(m[0])
    pivots: list[int] = []
    r = 0
    mul = F.mul_int
    for c in range(ncols):
        p = next((i for i in range(r, len(m)) if m[i][c]), None)
        if p is None:
            continue
        m[r], m[p] = m[p], m[r]
        inv = F.inv_int(m[r][c])
        if inv != 1:
            m[r] = [mul(inv, x) for x in m[r]]
        pivot_row = m[r]
        for i in range(len(m)):
            if i != r and m[i][c]:
                f = m[i][c]
                m[i] = [x ^ mul(f, y) for x, y in zip(m[i], pivot_row)]
        pivots.append(c)
        r += 1
        if r == len(m):
            break
    return m[:r], pivots


def rank(F: FiniteField, rows: Sequence[Sequence[int]]) -> int:
    return len(rref(F, rows)[1])


def nullspace(F: FiniteField, rows: Sequence[Sequence[int]], ncols: int) -> list[Row]:
    """Basis of {x : A x = 0} for A given by ``rows`` (ncols unknowns)."""
    if not rows:
        return [[1 if j == i else 0 for j in range(ncols)] for i in range(ncols)]
    red, piv = rref(F, rows)
    free = [c for c in range(ncols) if c not in piv]
    basis = []
    for f in free:
        x = [0] * ncols
        x[f] = 1
        for r, pc in zip(red, piv):
            x[pc] = r[f]  # char 2: -r[f] = r[f]
        basis.append(x)
    return basis


def solve(F: FiniteField, rows: Sequence[Sequence[int]], rhs: Sequence[int], ncols: int) -> Row | None:
    """One solution of A x = rhs (free variables set to 0), or None."""
    if not rows:
        return [0] * ncols
    aug = [list(r) + [b] for r, b in zip(rows, rhs)]
    red, piv = rref(F, aug)
    if piv and piv[-1] == ncols:
        return None
    x = [0] * ncols
    for r, pc in zip(red, piv):
        x[pc] = r[ncols]
    return x


def transpose(m: Sequence[Sequence[int]]) -> list[Row]:
    return [list(c) for c in zip(*m)]


def matmul(F: FiniteField, a: Sequence[Sequence[int]], b: Sequence[Sequence[int]]) -> list[Row]:
    mul = F.mul_int
    bt = transpose(b)
    out = []
    for row in a:
        out_row = []
        for col in bt:
            s = 0
            for x, y in zip(row, col):
                if x and y:
                    s ^= mul(x, y)
            out_row.append(s)
        out.append(out_row)
    return out


def matvec(F: FiniteField, a: Sequence[Sequence[int]], v: Sequence[int]) -> Row:
    mul = F.mul_int
    out = []
    for row in a:
        s = 0
        for x, y in zip(row, v):
            if x and y:
                s ^= mul(x, y)
        out.append(s)
    return out


def inverse(F: FiniteField, m: Sequence[Sequence[int]]) -> list[Row] | None:
    n = len(m)
    aug = [list(r) + [1 if j == i else 0 for j in range(n)] for i, r in enumerate(m)]
    red, piv = rref(F, aug)
    if len(piv) < n or piv[n - 1] != n - 1:
        return None
    return [r[n:] for r in red]


def identity(n: int) -> list[Row]:
    return [[1 if i == j else 0 for j in range(n)] for i in range(n)]


def coordinates(F: FiniteField, basis: Sequence[Sequence[int]], w: Sequence[int]) -> Row | None:
    """Coefficients c with sum c_i basis_i = w, or None if w is outside the span.

    ``basis`` must be independent for the answer to be unique.
    """
    if not basis:
        return [] if not any(w) else None
    cols = transpose(basis)
    return solve(F, cols, w, len(basis))


def complete_basis(F: FiniteField, vectors: Sequence[Sequence[int]], n: int) -> list[Row]:
    """Standard basis vectors (in index order) that extend ``vectors`` to a basis."""
    current = [list(v) for v in vectors]
    r = rank(F, current) if current else 0
    extra = []
    for i in range(n):
        if r == n:
            break
        e = [1 if j == i else 0 for j in range(n)]
        if rank(F, current + [e]) > r:
            current.append(e)
            extra.append(e)
            r += 1
    return extra
