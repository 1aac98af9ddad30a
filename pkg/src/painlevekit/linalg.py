"""Exact elimination for small systems whose entries are parameter polynomials.

Pivots are restricted to nonzero *constant* entries, so every operation
stays inside the polynomial ring and the rank is the same for every value
of the parameters.  When only non-constant entries remain in an
unpivoted block the rank is parameter dependent and
:class:`UnsupportedAlgebra` is raised.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Dict, List, Optional, Sequence, Tuple

from .polys import Poly

__all__ = ["UnsupportedAlgebra", "Elimination", "eliminate", "solve", "numeric_ranks",
           "determinant"]


class UnsupportedAlgebra(ArithmeticError):
    pass


@dataclass
class Elimination:
    rows: List[List[Poly]]
    rhs: List[Poly]
    pivots: Dict[int, int]  # column -> row
    free_columns: List[int]
    residual: List[Poly]  # rhs entries of rows without a pivot

    @property
    def rank(self) -> int:
        return len(self.pivots)

    @property
    def kernel_dim(self) -> int:
        return len(self.rows[0]) - self.rank if self.rows else 0

    @property
    def compatible(self) -> bool:
        return all(not r for r in self.residual)


def eliminate(matrix: Sequence[Sequence], rhs: Sequence) -> Elimination:
    """Gauss-Jordan elimination, scanning columns right to left.

    Scanning from the right leaves the leftmost columns free, so kernel
    directions are parametrised by the earliest variables.
    """
    rows = [[Poly.lift(x) for x in row] for row in matrix]
    b = [Poly.lift(x) for x in rhs]
    nrows = len(rows)
    ncols = len(rows[0]) if rows else 0
    used = set()
    pivots: Dict[int, int] = {}
    for col in reversed(range(ncols)):
        prow = None
        for r in range(nrows):
            if r in used:
                continue
            ent = rows[r][col]
            if ent and ent.is_constant():
                prow = r
                break
        if prow is None:
            continue
        inv = rows[prow][col].constant()
        rows[prow] = [x / inv for x in rows[prow]]
        b[prow] = b[prow] / inv
        for r in range(nrows):
            if r == prow:
                continue
            f = rows[r][col]
            if not f:
                continue
            rows[r] = [x - f * y for x, y in zip(rows[r], rows[prow])]
            b[r] = b[r] - f * b[prow]
        used.add(prow)
        pivots[col] = prow
    free = [c for c in range(ncols) if c not in pivots]
    for r in range(nrows):
        if r in used:
            continue
        if any(rows[r][c] for c in free):
            raise UnsupportedAlgebra("rank depends on the free parameters")
    residual = [b[r] for r in range(nrows) if r not in used]
    return Elimination(rows, b, pivots, free, residual)


def solve(matrix, rhs, fresh: Callable[[int], Poly]) -> Tuple[Optional[List[Poly]], Elimination]:
    """Solve ``matrix @ v = rhs``; kernel directions get symbols from ``fresh(col)``.

    Returns ``(None, elim)`` when the system is incompatible.
    """
    elim = eliminate(matrix, rhs)
    if not elim.compatible:
        return None, elim
    ncols = len(elim.rows[0])
    values: List[Optional[Poly]] = [None] * ncols
    for c in elim.free_columns:
        values[c] = fresh(c)
    for c, r in elim.pivots.items():
        acc = elim.rhs[r]
        for fc in elim.free_columns:
            coef = elim.rows[r][fc]
            if coef:
                acc = acc - coef * values[fc]
        values[c] = acc
    return values, elim


def numeric_ranks(matrix, rhs) -> Tuple[int, int]:
    """``(rank A, rank [A|b])`` for constant entries."""
    elim = eliminate(matrix, rhs)
    extra = 1 if not elim.compatible else 0
    return elim.rank, elim.rank + extra


def determinant(matrix: Sequence[Sequence]) -> Poly:
    """Laplace expansion along the first row (intended for dimension <= 4)."""
    m = [[Poly.lift(x) for x in row] for row in matrix]
    n = len(m)
    if n == 0:
        return Poly.const(1)
    if n == 1:
        return m[0][0]
    if n == 2:
        return m[0][0] * m[1][1] - m[0][1] * m[1][0]
    acc = Poly()
    for j in range(n):
        if not m[0][j]:
            continue
        minor = [row[:j] + row[j + 1:] for row in m[1:]]
        term = m[0][j] * determinant(minor)
        acc = acc + term if j % 2 == 0 else acc - term
    return acc
