"""Strictly monotonic skinny cuts on an ``n x m`` rectangle.

Weight matrices are given as a list of ``m`` columns, each listing the ``n``
weights from the top row down. A strictly monotonic cut picks one tile per
column and moves at most one row between neighbouring columns; it is reported
as a tuple of 1-based row numbers.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Sequence

from .vectors import to_fraction


class NotDecomposable(ValueError):
    pass


def _columns(rect) -> list[list[Fraction]]:
    cols = [[to_fraction(v) for v in col] for col in rect]
    if not cols or not cols[0]:
        raise ValueError("empty weight matrix")
    n = len(cols[0])
    if any(len(c) != n for c in cols):
        raise ValueError("columns have different lengths")
    if any(v < 0 for c in cols for v in c):
        raise ValueError("weights must be nonnegative")
    if not any(v for c in cols for v in c):
        raise ValueError("weight matrix is identically zero")
    return cols


def _prefix(col):
    out = [Fraction(0)]
    for v in col:
        out.append(out[-1] + v)
    return out


def is_sum_of_monotone_cuts(rect: Sequence[Sequence]) -> bool:
    """Equal column sums and the interleaving prefix-sum inequalities."""
    cols = _columns(rect)
    n = len(cols[0])
    for left, right in zip(cols, cols[1:]):
        p, q = _prefix(left), _prefix(right)
        if p[n] != q[n]:
            return False
        for k in range(1, n):
            if p[k] > q[k + 1] or q[k] > p[k + 1]:
                return False
    return True


def is_strictly_monotone_cut(rows: Sequence[int], n: int) -> bool:
    return all(1 <= r <= n for r in rows) and all(abs(a - b) <= 1 for a, b in zip(rows, rows[1:]))


def decompose_monotone_cuts(rect: Sequence[Sequence]) -> list[tuple[Fraction, tuple[int, ...]]]:
    """Greedy peeling into ``(coefficient, rows)`` pairs.

    Repeatedly takes the topmost nonzero tile of every column, removes the
    smallest of their weights along that cut, and continues until nothing
    is left. Each step zeroes at least one tile.
    """
    if not is_sum_of_monotone_cuts(rect):
        raise NotDecomposable("matrix violates the monotone-cut inequalities")
    cols = _columns(rect)
    n = len(cols[0])
    out = []
    while any(v for c in cols for v in c):
        rows = tuple(next(i for i, v in enumerate(c) if v) for c in cols)
        if not is_strictly_monotone_cut([r + 1 for r in rows], n):
            raise NotDecomposable(f"topmost tiles {rows} do not form a monotone cut")
        coef = min(c[r] for c, r in zip(cols, rows))
        for c, r in zip(cols, rows):
            c[r] -= coef
        out.append((coef, tuple(r + 1 for r in rows)))
    return out


def recompose(cuts, n: int, m: int) -> list[list[Fraction]]:
    """Weighted sum of cut indicator functions, as columns."""
    cols = [[Fraction(0)] * n for _ in range(m)]
    for coef, rows in cuts:
        for j, r in enumerate(rows):
            cols[j][r - 1] += coef
    return cols
