"""The skinny cut function and its calculus, in exact arithmetic.

``phi(x)`` is the least-area weight vector compatible with ``x``. In partition
coordinates this is the minimiser of ``sum (q_k - q_{k-1})**2`` over
``p_{k-1} <= q_k <= p_{k+1}`` with ``q_0 = 0`` and ``q_n = H(x)``, which is the
taut string through that corridor.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .vectors import (
    WeightVector,
    is_compatible,
    is_uniform,
    leaners,
    partition,
    segments,
    unpartition,
    vector,
)


class NotInImage(ValueError):
    """The vector is not a value of the skinny cut function."""


@dataclass(frozen=True)
class PhiResult:
    y: WeightVector
    blocked_leaners: tuple[tuple[int, str, int], ...]  # (k, direction, blocking index)


@dataclass(frozen=True)
class MuValue:
    mu: int
    per_index: tuple[int, ...]  # mu_1, ..., mu_{n-1}


def taut_string(lower, upper):
    """Taut string through ``lower[k] <= q[k] <= upper[k]``, ``k = 0..n``.

    The endpoints must be pinned (``lower[0] == upper[0]`` and
    ``lower[n] == upper[n]``). Returns the knot values ``q[0..n]``; the
    string is linear between integer abscissae, so rational inputs give
    rational outputs.
    """
    n = len(lower) - 1
    if lower[0] != upper[0] or lower[n] != upper[n]:
        raise ValueError("corridor endpoints must be pinned")
    q = [None] * (n + 1)
    a, qa = 0, lower[0]
    q[0] = qa
    while a < n:
        lo_slope = hi_slope = None
        lo_idx = hi_idx = a
        bend = None
        for k in range(a + 1, n + 1):
            sl = (lower[k] - qa) / (k - a)
            su = (upper[k] - qa) / (k - a)
            if hi_slope is not None and sl > hi_slope:
                bend = (hi_idx, upper[hi_idx])  # pushed down by the ceiling
                break
            if lo_slope is not None and su < lo_slope:
                bend = (lo_idx, lower[lo_idx])  # pushed up by the floor
                break
            if lo_slope is None or sl >= lo_slope:
                lo_slope, lo_idx = sl, k
            if hi_slope is None or su <= hi_slope:
                hi_slope, hi_idx = su, k
        b, qb = bend if bend is not None else (n, lower[n])
        slope = (qb - qa) / (b - a)
        for k in range(a + 1, b + 1):
            q[k] = qa + slope * (k - a)
        q[b] = qb
        a, qa = b, qb
    return q


def _blocked(p, q, ys):
    out = []
    for l in leaners(ys):
        k = l.index
        if l.direction == "left" and q[k] == p[k - 1]:
            out.append((k, "left", k - 1))
        elif l.direction == "right" and q[k] == p[k + 1]:
            out.append((k, "right", k + 1))
    return out


def is_minimal_compatible(x, y) -> bool:
    """True iff ``y`` is compatible with ``x`` and ``x`` blocks every leaner of ``y``."""
    x, y = vector(x), vector(y)
    if not is_compatible(x, y):
        return False
    p, q = partition(x), partition(y)
    return len(_blocked(p, q, y)) == len(leaners(y))


def phi(x) -> PhiResult:
    """Evaluate the skinny cut function; the result is certified before returning."""
    x = vector(x)
    n = x.n
    p = partition(x)
    if n == 1:
        return PhiResult(x, ())
    lower = [p[0]] + [p[k - 1] for k in range(1, n)] + [p[n]]
    upper = [p[0]] + [p[k + 1] for k in range(1, n)] + [p[n]]
    q = taut_string(lower, upper)
    y = unpartition(q)
    if not is_minimal_compatible(x, y):
        raise AssertionError(f"taut string failed its certificate for {x}")
    return PhiResult(y, tuple(_blocked(p, q, y)))


def iterate_phi(x, m: int) -> WeightVector:
    if m < 0:
        raise ValueError("iteration count must be nonnegative")
    x = vector(x)
    for _ in range(m):
        x = phi(x).y
    return x


def iterations_to_uniform(x, limit=None) -> int:
    """Least ``m`` with ``phi^m(x)`` uniform (searching up to ``limit``)."""
    x = vector(x)
    limit = 10 * x.n if limit is None else limit
    for m in range(limit + 1):
        if is_uniform(x):
            return m
        x = phi(x).y
    raise RuntimeError(f"no fixed point within {limit} iterations")


def minimal_preimage(y) -> WeightVector:
    """Least-area ``x`` with ``phi(x) = y``, from segment dimension arithmetic.

    Each segment keeps its height; its dimension grows by one per endpoint
    leaning away and shrinks by one per endpoint leaning toward it.
    """
    y = vector(y)
    comps = []
    for s in segments(y):
        dim = s.dimension + s.away - s.toward
        if dim < 1:
            raise NotInImage(f"segment {s.start}..{s.end} of {y} would have dimension {dim}")
        comps.extend([s.height / dim] * dim)
    if len(comps) != y.n:
        raise NotInImage(f"dimensions of {y} do not add up")
    x = WeightVector(tuple(comps))
    if phi(x).y != y:
        raise NotInImage(f"{y} is not a value of phi (candidate {x} maps elsewhere)")
    return x


def mu(x) -> MuValue:
    """Per-index counts of partition points between ``p_i`` and ``h*i/n``."""
    x = vector(x)
    n = x.n
    p = partition(x)
    h = p[n]
    per = []
    for i in range(1, n):
        target = h * i / n
        if p[i] < target:
            per.append(sum(1 for k in range(i, n) if p[i] <= p[k] < target))
        elif p[i] > target:
            per.append(sum(1 for k in range(1, i + 1) if target < p[k] <= p[i]))
        else:
            per.append(0)
    return MuValue(max(per, default=0), tuple(per))


def extend_rectangle(x, m: int) -> list[WeightVector]:
    """Columns ``x, phi(x), ..., phi^{m-1}(x)`` of the minimal-area extension."""
    if m < 1:
        raise ValueError("need at least one column")
    cols = [vector(x)]
    for _ in range(m - 1):
        cols.append(phi(cols[-1]).y)
    return cols

