"""Small exact rational linear algebra helpers."""

from __future__ import annotations

from fractions import Fraction


def independent_columns(columns) -> list[int]:
    """Indices of a maximal linearly independent subset, greedy in order.

    Columns are given sparsely as ``{row: value}`` dicts (or iterables of
    row indices for 0/1 columns).
    """
    basis: dict[int, dict[int, Fraction]] = {}  # pivot row -> reduced vector (pivot entry 1)
    keep = []
    for j, col in enumerate(columns):
        v = dict(col) if isinstance(col, dict) else {r: Fraction(1) for r in col}
        v = {r: Fraction(x) for r, x in v.items() if x}
        for piv in sorted(basis):
            if piv in v:
                f = v[piv]
                for r, x in basis[piv].items():
                    nv = v.get(r, 0) - f * x
                    if nv:
                        v[r] = nv
                    else:
                        v.pop(r, None)
        if v:
            piv = min(v)
            f = v[piv]
            vec = {r: x / f for r, x in v.items()}
            # keep the basis reduced so later sweeps need one pass
            for other in basis.values():
                if piv in other:
                    g = other[piv]
                    for r, x in vec.items():
                        nv = other.get(r, 0) - g * x
                        if nv:
                            other[r] = nv
                        else:
                            other.pop(r, None)
            basis[piv] = vec
            keep.append(j)
    return keep


def solve(matrix, rhs) -> list[Fraction]:
    """Solve a square nonsingular system exactly by Gauss-Jordan elimination."""
    n = len(matrix)
    a = [[Fraction(x) for x in row] + [Fraction(b)] for row, b in zip(matrix, rhs)]
    for col in range(n):
        piv = next((r for r in range(col, n) if a[r][col] != 0), None)
        if piv is None:
            raise ZeroDivisionError("singular system")
        a[col], a[piv] = a[piv], a[col]
        inv = 1 / a[col][col]
        row = [x * inv for x in a[col]]
        a[col] = row
        for r in range(n):
            if r != col and a[r][col] != 0:
                f = a[r][col]
                a[r] = [x - f * y for x, y in zip(a[r], row)]
    return [a[r][n] for r in range(n)]


def gram(columns: list[list[int]]) -> list[list[int]]:
    """Gram matrix of 0/1 columns given as sorted row-index lists."""
    sets = [set(c) for c in columns]
    k = len(sets)
    g = [[0] * k for _ in range(k)]
    for i in range(k):
        for j in range(i, k):
            g[i][j] = g[j][i] = len(sets[i] & sets[j])
    return g
