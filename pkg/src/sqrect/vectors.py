"""Exact weight vectors and their partition, leaner and segment views.

Components are stored as :class:`fractions.Fraction`; every comparison in this
module is exact.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence, Union

Number = Union[int, Fraction, str]


def to_fraction(v) -> Fraction:
    """Parse ints, Fractions, ``"p/q"`` strings and (exactly) floats."""
    if isinstance(v, Fraction):
        return v
    if isinstance(v, bool):
        raise TypeError("booleans are not weights")
    if isinstance(v, (int, str)):
        return Fraction(v)
    if isinstance(v, float):
        return Fraction(v)
    # numpy scalars and friends
    return Fraction(str(v)) if not hasattr(v, "numerator") else Fraction(v.numerator, v.denominator)


class NotAPartition(ValueError):
    pass


@dataclass(frozen=True)
class WeightVector:
    """Nonnegative rational components, not all zero."""

    components: tuple[Fraction, ...]

    def __post_init__(self):
        comps = tuple(to_fraction(v) for v in self.components)
        if not comps:
            raise ValueError("a weight vector needs at least one component")
        if any(v < 0 for v in comps):
            raise ValueError(f"negative component in {comps}")
        if not any(comps):
            raise ValueError("a weight vector cannot be identically zero")
        object.__setattr__(self, "components", comps)

    @property
    def n(self) -> int:
        return len(self.components)

    def __len__(self):
        return len(self.components)

    def __iter__(self):
        return iter(self.components)

    def __getitem__(self, i):
        return self.components[i]

    def __mul__(self, r):
        r = to_fraction(r)
        if r <= 0:
            raise ValueError("weight vectors scale by positive numbers only")
        return WeightVector(tuple(r * v for v in self.components))

    __rmul__ = __mul__

    def __repr__(self):
        return "WeightVector(" + ", ".join(str(v) for v in self.components) + ")"

    def to_json(self) -> list[str]:
        return [str(v) for v in self.components]

    def as_floats(self) -> list[float]:
        return [float(v) for v in self.components]


def vector(x: Union[WeightVector, Iterable[Number]]) -> WeightVector:
    return x if isinstance(x, WeightVector) else WeightVector(tuple(x))


def H(x) -> Fraction:
    """Height: the component sum."""
    return sum(vector(x).components, Fraction(0))


def A(x) -> Fraction:
    """Area: the sum of squared components."""
    return sum((v * v for v in vector(x).components), Fraction(0))


def uniform(n: int, h) -> WeightVector:
    """The vector with ``n`` components equal to ``h/n``."""
    if n < 1:
        raise ValueError("n must be at least 1")
    h = to_fraction(h)
    if h <= 0:
        raise ValueError("h must be positive")
    return WeightVector((h / n,) * n)


def is_uniform(x) -> bool:
    x = vector(x)
    return all(v == x[0] for v in x)


def partition(x) -> tuple[Fraction, ...]:
    """Partition points ``(p_0, ..., p_n)``, the prefix sums of ``x``."""
    pts = [Fraction(0)]
    for v in vector(x):
        pts.append(pts[-1] + v)
    return tuple(pts)


def unpartition(p: Sequence[Number]) -> WeightVector:
    """Inverse of :func:`partition` for a weak partition starting at 0."""
    p = [to_fraction(v) for v in p]
    if len(p) < 2 or p[0] != 0:
        raise NotAPartition("a partition must start at 0 and have at least two points")
    if any(b < a for a, b in zip(p, p[1:])):
        raise NotAPartition(f"partition points decrease: {p}")
    if p[-1] == 0:
        raise NotAPartition("a partition of [0, 0] has no weight vector")
    return WeightVector(tuple(b - a for a, b in zip(p, p[1:])))


@dataclass(frozen=True)
class Leaner:
    """Interior partition point ``p_k`` where neighbouring components differ."""

    index: int
    direction: str  # "left" when x_k > x_{k+1}, "right" when x_k < x_{k+1}


def leaners(x) -> list[Leaner]:
    x = vector(x)
    out = []
    for k in range(1, x.n):
        a, b = x[k - 1], x[k]
        if a > b:
            out.append(Leaner(k, "left"))
        elif a < b:
            out.append(Leaner(k, "right"))
    return out


@dataclass(frozen=True)
class Segment:
    """Maximal run ``x_{start+1} = ... = x_end`` between leaners or interval ends.

    ``left_lean``/``right_lean`` say how each endpoint leans relative to the
    segment: ``"away"``, ``"toward"`` or ``"end"`` for ``0`` and ``h``.
    """

    start: int
    end: int
    value: Fraction
    left_lean: str
    right_lean: str

    @property
    def dimension(self) -> int:
        return self.end - self.start

    @property
    def height(self) -> Fraction:
        return self.value * self.dimension

    @property
    def away(self) -> int:
        return (self.left_lean == "away") + (self.right_lean == "away")

    @property
    def toward(self) -> int:
        return (self.left_lean == "toward") + (self.right_lean == "toward")


def segments(x) -> list[Segment]:
    x = vector(x)
    lean = {l.index: l.direction for l in leaners(x)}
    cuts = [0] + sorted(lean) + [x.n]
    segs = []
    for i, j in zip(cuts, cuts[1:]):
        # a left leaner leans away from the segment on its right, toward the one on its left
        left = "end" if i == 0 else ("away" if lean[i] == "left" else "toward")
        right = "end" if j == x.n else ("toward" if lean[j] == "left" else "away")
        segs.append(Segment(i, j, x[i], left, right))
    return segs


def is_compatible(x, y) -> bool:
    """Equal heights and ``q_{k-1} <= p_k <= q_{k+1}`` for ``0 < k < n``."""
    x, y = vector(x), vector(y)
    if x.n != y.n:
        raise ValueError("vectors have different lengths")
    p, q = partition(x), partition(y)
    if p[-1] != q[-1]:
        return False
    return all(q[k - 1] <= p[k] <= q[k + 1] for k in range(1, x.n))


def distance_sq(x, y) -> Fraction:
    x, y = vector(x), vector(y)
    return sum(((a - b) ** 2 for a, b in zip(x, y)), Fraction(0))
