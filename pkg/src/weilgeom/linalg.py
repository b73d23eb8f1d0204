"""Dense matrix helpers over any commutative ring with division by units.

Entries may be rationals, floats or Weil-algebra elements; a pivot is usable
when its scalar part is nonzero, which is exactly invertibility in a local ring.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Sequence

from .scalars import is_exact
from .weil import scalar_part

Matrix = list[list]


def identity(n: int) -> Matrix:
    return [[1 if i == j else 0 for j in range(n)] for i in range(n)]


def zeros(m: int, n: int) -> Matrix:
    return [[0] * n for _ in range(m)]


def transpose(a: Sequence[Sequence]) -> Matrix:
    return [list(col) for col in zip(*a)]


def matmul(a: Sequence[Sequence], b: Sequence[Sequence]) -> Matrix:
    bt = transpose(b)
    return [[sum((x * y for x, y in zip(row, col)), 0) for col in bt] for row in a]


def matvec(a: Sequence[Sequence], v: Sequence) -> list:
    return [sum((x * y for x, y in zip(row, v)), 0) for row in a]


def dot(u: Sequence, v: Sequence):
    return sum((x * y for x, y in zip(u, v)), 0)


def bilinear(g: Sequence[Sequence], u: Sequence, v: Sequence):
    """``u^T g v``; skips zero entries of ``g`` to keep nested arithmetic cheap."""
    total = 0
    for i, row in enumerate(g):
        for j, gij in enumerate(row):
            if isinstance(gij, (int, Fraction)) and gij == 0:
                continue
            total = total + gij * u[i] * v[j]
    return total


def _pivot_row(a: Matrix, col: int, start: int) -> int | None:
    best, best_mag = None, 0.0
    for r in range(start, len(a)):
        s = scalar_part(a[r][col])
        if s == 0:
            continue
        if is_exact(s):
            return r
        if abs(s) > best_mag:
            best, best_mag = r, abs(s)
    return best


def _inverse_of(x):
    if isinstance(x, int):
        return Fraction(1, x)
    return 1 / x


def inverse(a: Sequence[Sequence]) -> Matrix:
    """Gauss-Jordan inverse; raises ``ZeroDivisionError`` if singular."""
    n = len(a)
    work = [list(row) + [1 if i == j else 0 for j in range(n)] for i, row in enumerate(a)]
    for col in range(n):
        p = _pivot_row(work, col, col)
        if p is None:
            raise ZeroDivisionError("matrix is singular")
        work[col], work[p] = work[p], work[col]
        inv = _inverse_of(work[col][col])
        work[col] = [x * inv for x in work[col]]
        for r in range(n):
            if r != col:
                f = work[r][col]
                if isinstance(f, (int, Fraction)) and f == 0:
                    continue
                work[r] = [x - f * y for x, y in zip(work[r], work[col])]
    return [row[n:] for row in work]


def det(a: Sequence[Sequence]):
    n = len(a)
    work = [list(row) for row in a]
    result = 1
    for col in range(n):
        p = _pivot_row(work, col, col)
        if p is None:
            return 0 * work[0][0] if n else 1
        if p != col:
            work[col], work[p] = work[p], work[col]
            result = -result
        piv = work[col][col]
        result = result * piv
        inv = _inverse_of(piv)
        for r in range(col + 1, n):
            f = work[r][col] * inv
            work[r] = [x - f * y for x, y in zip(work[r], work[col])]
    return result


def exact_rank(a: Sequence[Sequence]) -> int:
    work = [[Fraction(x) for x in row] for row in a]
    rank, rows = 0, len(work)
    cols = len(work[0]) if rows else 0
    for col in range(cols):
        p = next((r for r in range(rank, rows) if work[r][col] != 0), None)
        if p is None:
            continue
        work[rank], work[p] = work[p], work[rank]
        for r in range(rank + 1, rows):
            f = work[r][col] / work[rank][col]
            work[r] = [x - f * y for x, y in zip(work[r], work[rank])]
        rank += 1
    return rank


def float_rank(a: Sequence[Sequence], rtol: float) -> int:
    import numpy as np

    if not a:
        return 0
    s = np.linalg.svd(np.array(a, dtype=float), compute_uv=False)
    if s.size == 0 or s[0] == 0:
        return 0
    return int((s > rtol * s[0]).sum())


def rank(a: Sequence[Sequence], rtol: float = 1e-9) -> int:
    if all(is_exact(x) for row in a for x in row):
        return exact_rank(a)
    return float_rank(a, rtol)
