"""Exact integer linear algebra.

Matrices are plain ``list[list[int]]`` in row-major order; Python integers give
arbitrary precision for free. The central routine is :func:`smith_normal_form`,
which also returns the inverses of both unimodular transforms so callers can
move between quotient coordinates and lifts without a second elimination.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence

Matrix = list[list[int]]
Vector = list[int]


def zeros(rows: int, cols: int) -> Matrix:
    return [[0] * cols for _ in range(rows)]


def identity(size: int) -> Matrix:
    m = zeros(size, size)
    for i in range(size):
        m[i][i] = 1
    return m


def shape(a: Sequence[Sequence[int]], cols: Optional[int] = None) -> tuple[int, int]:
    rows = len(a)
    if rows == 0:
        return 0, cols or 0
    return rows, len(a[0])


def matmul(a: Matrix, b: Matrix, inner: Optional[int] = None) -> Matrix:
    """Product of integer matrices; ``inner`` fixes the shared size when a side is empty."""
    rows = len(a)
    k = len(b) if b else (inner if inner is not None else (len(a[0]) if a else 0))
    cols = len(b[0]) if b else 0
    out = zeros(rows, cols)
    for i in range(rows):
        ai = a[i]
        oi = out[i]
        for t in range(k):
            x = ai[t]
            if x:
                bt = b[t]
                for j in range(cols):
                    y = bt[j]
                    if y:
                        oi[j] += x * y
    return out


def matvec(a: Matrix, x: Sequence[int]) -> Vector:
    return [sum(r * v for r, v in zip(row, x) if r and v) for row in a]


def transpose(a: Matrix, cols: Optional[int] = None) -> Matrix:
    if not a:
        return [[] for _ in range(cols or 0)]
    return [list(col) for col in zip(*a)]


def column(a: Matrix, j: int) -> Vector:
    return [row[j] for row in a]


def from_columns(cols: Sequence[Sequence[int]], rows: int) -> Matrix:
    m = zeros(rows, len(cols))
    for j, c in enumerate(cols):
        for i, v in enumerate(c):
            m[i][j] = v
    return m


def is_diagonal(a: Matrix) -> bool:
    return all(v == 0 for i, row in enumerate(a) for j, v in enumerate(row) if i != j)


def determinant(a: Matrix) -> int:
    """Exact determinant by fraction-free (Bareiss) elimination."""
    n = len(a)
    if n == 0:
        return 1
    m = [row[:] for row in a]
    sign = 1
    prev = 1
    for k in range(n - 1):
        if m[k][k] == 0:
            swap = next((i for i in range(k + 1, n) if m[i][k] != 0), None)
            if swap is None:
                return 0
            m[k], m[swap] = m[swap], m[k]
            sign = -sign
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                m[i][j] = (m[i][j] * m[k][k] - m[i][k] * m[k][j]) // prev
        prev = m[k][k]
    return sign * m[n - 1][n - 1]


@dataclass(frozen=True)
class SmithDecomposition:
    """``u @ a @ v == diag`` with ``u``, ``v`` unimodular.

    ``diagonal`` has length ``min(rows, cols)``; entries are non-negative and
    each divides the next, zeros last.
    """

    diagonal: tuple[int, ...]
    u: Matrix
    v: Matrix
    u_inv: Matrix
    v_inv: Matrix
    rows: int
    cols: int

    @property
    def rank(self) -> int:
        return sum(1 for x in self.diagonal if x != 0)

    def diag_matrix(self) -> Matrix:
        d = zeros(self.rows, self.cols)
        for i, x in enumerate(self.diagonal):
            d[i][i] = x
        return d


def smith_normal_form(a: Matrix, cols: Optional[int] = None) -> SmithDecomposition:
    """Smith normal form with transforms, pivoting on the smallest nonzero entry.

    ``cols`` is only needed when ``a`` has no rows.
    """
    rows = len(a)
    ncols = len(a[0]) if rows else (cols or 0)
    m = [list(r) for r in a]
    u = identity(rows)
    u_inv = identity(rows)
    v = identity(ncols)
    v_inv = identity(ncols)

    # Row ops act on u from the left and on u_inv from the right (inverse op);
    # column ops act on v from the right and on v_inv from the left.
    def row_swap(i, j):
        m[i], m[j] = m[j], m[i]
        u[i], u[j] = u[j], u[i]
        for r in u_inv:
            r[i], r[j] = r[j], r[i]

    def col_swap(i, j):
        for r in m:
            r[i], r[j] = r[j], r[i]
        for r in v:
            r[i], r[j] = r[j], r[i]
        v_inv[i], v_inv[j] = v_inv[j], v_inv[i]

    def row_add(dst, src, c):
        # row_dst += c * row_src
        md, ms = m[dst], m[src]
        for k in range(ncols):
            if ms[k]:
                md[k] += c * ms[k]
        ud, us = u[dst], u[src]
        for k in range(rows):
            if us[k]:
                ud[k] += c * us[k]
        for r in u_inv:
            if r[dst]:
                r[src] -= c * r[dst]

    def col_add(dst, src, c):
        # col_dst += c * col_src
        for r in m:
            if r[src]:
                r[dst] += c * r[src]
        for r in v:
            if r[src]:
                r[dst] += c * r[src]
        vd, vs = v_inv[dst], v_inv[src]
        for k in range(ncols):
            if vd[k]:
                vs[k] -= c * vd[k]

    def row_neg(i):
        m[i] = [-x for x in m[i]]
        u[i] = [-x for x in u[i]]
        for r in u_inv:
            r[i] = -r[i]

    t = 0
    limit = min(rows, ncols)
    while t < limit:
        best = None
        for i in range(t, rows):
            mi = m[i]
            for j in range(t, ncols):
                x = mi[j]
                if x and (best is None or abs(x) < best[0]):
                    best = (abs(x), i, j)
                    if best[0] == 1:
                        break
            if best is not None and best[0] == 1:
                break
        if best is None:
            break
        _, pi, pj = best
        if pi != t:
            row_swap(pi, t)
        if pj != t:
            col_swap(pj, t)
        while True:
            p = m[t][t]
            dirty = False
            for i in range(t + 1, rows):
                x = m[i][t]
                if x:
                    q = x // p
                    row_add(i, t, -q)
                    if m[i][t]:
                        dirty = True
            for j in range(t + 1, ncols):
                x = m[t][j]
                if x:
                    q = x // p
                    col_add(j, t, -q)
                    if m[t][j]:
                        dirty = True
            if dirty:
                # a remainder smaller than the pivot appeared; move it to the pivot spot
                best = None
                for i in range(t, rows):
                    x = m[i][t]
                    if x and (best is None or abs(x) < best[0]):
                        best = (abs(x), i, "r")
                for j in range(t, ncols):
                    x = m[t][j]
                    if x and (best is None or abs(x) < best[0]):
                        best = (abs(x), j, "c")
                _, idx, kind = best
                if kind == "r" and idx != t:
                    row_swap(idx, t)
                elif kind == "c" and idx != t:
                    col_swap(idx, t)
                continue
            # pivot must divide the rest of the block
            bad = None
            for i in range(t + 1, rows):
                mi = m[i]
                for j in range(t + 1, ncols):
                    if mi[j] % p:
                        bad = i
                        break
                if bad is not None:
                    break
            if bad is None:
                break
            row_add(t, bad, 1)
        if m[t][t] < 0:
            row_neg(t)
        t += 1

    diag = tuple(m[i][i] for i in range(limit))
    return SmithDecomposition(diag, u, v, u_inv, v_inv, rows, ncols)


def cokernel_structure(a: Matrix, cols: Optional[int] = None) -> tuple[list[int], int]:
    """``Z^rows / image(a)`` as (torsion invariant factors > 1, free rank)."""
    rows = len(a)
    snf = smith_normal_form(a, cols)
    torsion = [x for x in snf.diagonal if x > 1]
    free = rows - snf.rank
    return torsion, free


def kernel_basis(a: Matrix, cols: Optional[int] = None) -> Matrix:
    """Columns form a saturated basis of the integer kernel of ``a``."""
    snf = smith_normal_form(a, cols)
    ncols = snf.cols
    r = snf.rank
    return [row[r:] for row in snf.v] if ncols else []


def solve_with(snf: SmithDecomposition, b: Sequence[int]) -> Optional[Vector]:
    """Solve ``a x = b`` reusing a precomputed decomposition of ``a``."""
    c = matvec(snf.u, b)
    y = [0] * snf.cols
    for i, ci in enumerate(c):
        di = snf.diagonal[i] if i < len(snf.diagonal) else 0
        if di == 0:
            if ci != 0:
                return None
        else:
            if ci % di:
                return None
            y[i] = ci // di
    return matvec(snf.v, y)


def solve_integer(a: Matrix, b: Sequence[int], cols: Optional[int] = None) -> Optional[Vector]:
    """An integer ``x`` with ``a x = b``, or ``None`` when no integral solution exists."""
    if len(b) != len(a):
        raise ValueError(f"dimension mismatch: {len(a)} rows but rhs of length {len(b)}")
    return solve_with(smith_normal_form(a, cols), b)


def unimodular_inverse(a: Matrix) -> Matrix:
    """Inverse of a square integer matrix with determinant +-1."""
    snf = smith_normal_form(a)
    if len(a) and any(x != 1 for x in snf.diagonal):
        raise ValueError("matrix is not unimodular")
    # u a v = I  =>  a^{-1} = v u
    return matmul(snf.v, snf.u, inner=len(a))


def is_unimodular(a: Matrix) -> bool:
    return len(a) == 0 or (len(a) == len(a[0]) and abs(determinant(a)) == 1)
