"""Dumbbells: a left ball, a horizontal bar and a right ball.

The bar is an ``n``-row, ``w``-column block with ``w >= 6n``. Balls may be
empty; when present they attach only along the bar's end columns.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping, Optional

import numpy as np

from .grid import (
    ComplexError,
    GridComplex,
    HasHoles,
    NotConnected,
    build_complex,
    extreme_corners,
    skinny_distances,
    subdivide_binary,
    weight_array,
)


class DumbbellError(ComplexError):
    pass


class BarTooShort(DumbbellError):
    pass


class AttachmentNotConnected(DumbbellError):
    pass


class NotADisk(DumbbellError):
    pass


class BarOffArcs(DumbbellError):
    """The bar's top or bottom row does not lie on the top or bottom arc."""


@dataclass(frozen=True)
class Bar:
    origin: tuple[int, int]  # lower-left tile
    width: int
    height: int

    def tiles(self) -> set:
        x0, y0 = self.origin
        return {(x0 + i, y0 + j) for i in range(self.width) for j in range(self.height)}

    def to_json(self):
        return {"origin": list(self.origin), "width": self.width, "height": self.height}


@dataclass(frozen=True)
class Dumbbell:
    complex: GridComplex
    bar: Bar
    left_ball: frozenset
    right_ball: frozenset

    @property
    def n(self) -> int:
        return self.bar.height

    @property
    def bar_tiles(self) -> list:
        return sorted(self.bar.tiles())

    def to_json(self) -> dict:
        return {
            "bar": self.bar.to_json(),
            "left_ball": [list(t) for t in sorted(self.left_ball)],
            "right_ball": [list(t) for t in sorted(self.right_ball)],
            "corners": [list(v) for v in self.complex.corners],
        }

    def dumps(self) -> str:
        return json.dumps(self.to_json())

    @classmethod
    def from_json(cls, doc: Mapping) -> "Dumbbell":
        return dumbbell_from_json(doc)


def _rows_contiguous(rows) -> bool:
    rows = sorted(rows)
    return all(b == a + 1 for a, b in zip(rows, rows[1:]))


def _check_side(ball, bar: Bar, side: str):
    x0, y0 = bar.origin
    n, w = bar.height, bar.width
    bar_tiles = bar.tiles()
    end_col = x0 if side == "left" else x0 + w - 1
    outside = x0 - 1 if side == "left" else x0 + w
    rows = []
    for t in ball:
        for dx, dy in ((-1, 0), (1, 0), (0, -1), (0, 1)):
            u = (t[0] + dx, t[1] + dy)
            if u not in bar_tiles:
                continue
            if u[0] != end_col or t[0] != outside:
                raise AttachmentNotConnected(
                    f"{side} ball tile {t} touches the bar away from its {side} end column"
                )
            rows.append(t[1])
    if ball and not rows:
        raise AttachmentNotConnected(f"{side} ball does not touch the bar")
    if not _rows_contiguous(set(rows)):
        raise AttachmentNotConnected(f"{side} ball attaches along rows {sorted(set(rows))}")


def _check_bar_on_arcs(c: GridComplex, bar: Bar):
    x0, y0 = bar.origin
    top_y, bot_y = y0 + bar.height, y0
    top = {tuple(sorted(e)) for e in c.arcs.top}
    bottom = {tuple(sorted(e)) for e in c.arcs.bottom}
    for i in range(bar.width):
        x = x0 + i
        if ((x, top_y), (x + 1, top_y)) not in top:
            raise BarOffArcs(f"top of bar column {x} is not on the top arc")
        if ((x, bot_y), (x + 1, bot_y)) not in bottom:
            raise BarOffArcs(f"bottom of bar column {x} is not on the bottom arc")


def build_dumbbell(bar: Bar, left_ball=(), right_ball=(), corners=None) -> Dumbbell:
    """Validate a bar and two balls; corners default to the extreme corners."""
    if bar.height < 1 or bar.width < 1:
        raise DumbbellError("the bar must be nonempty")
    if bar.width < 6 * bar.height:
        raise BarTooShort(f"bar width {bar.width} is less than 6 x height {bar.height}")
    left = frozenset((int(x), int(y)) for x, y in left_ball)
    right = frozenset((int(x), int(y)) for x, y in right_ball)
    bar_tiles = bar.tiles()
    if left & right or left & bar_tiles or right & bar_tiles:
        raise DumbbellError("bar and balls must be disjoint")
    _check_side(left, bar, "left")
    _check_side(right, bar, "right")
    for t in left:
        if any((t[0] + dx, t[1] + dy) in right for dx, dy in ((-1, 0), (1, 0), (0, -1), (0, 1))):
            raise AttachmentNotConnected("the balls touch each other")
    tiles = bar_tiles | left | right
    if corners is None:
        corners = extreme_corners(tiles)
    try:
        c = build_complex(tiles, corners)
    except (NotConnected, HasHoles) as exc:
        raise NotADisk(str(exc)) from exc
    _check_bar_on_arcs(c, bar)
    return Dumbbell(c, bar, left, right)


def dumbbell_from_json(doc: Mapping) -> Dumbbell:
    try:
        b = doc["bar"]
        bar = Bar((int(b["origin"][0]), int(b["origin"][1])), int(b["width"]), int(b["height"]))
        left = [tuple(t) for t in doc.get("left_ball", [])]
        right = [tuple(t) for t in doc.get("right_ball", [])]
        corners = doc.get("corners")
    except (KeyError, TypeError, ValueError, IndexError) as exc:
        raise DumbbellError(f"malformed dumbbell document: {exc}") from exc
    return build_dumbbell(bar, left, right, corners)


def subdivide_dumbbell(d: Dumbbell, level: int = 1) -> Dumbbell:
    for _ in range(level):
        c = subdivide_binary(d.complex)
        kids = lambda s: frozenset((2 * x + i, 2 * y + j) for x, y in s for i in (0, 1) for j in (0, 1))
        bar = Bar((2 * d.bar.origin[0], 2 * d.bar.origin[1]), 2 * d.bar.width, 2 * d.bar.height)
        d = Dumbbell(c, bar, kids(d.left_ball), kids(d.right_ball))
    return d


def ball_distances(d: Dumbbell) -> np.ndarray:
    """Skinny hop distance from each tile to the nearest ball tile (``inf`` if no balls)."""
    balls = sorted(d.left_ball | d.right_ball)
    if not balls:
        return np.full(len(d.complex), np.inf)
    return skinny_distances(d.complex, balls)


def middle_tiles(d: Dumbbell, threshold: Optional[float] = None) -> set:
    """Bar tiles at skinny distance at least ``threshold`` (default ``3n``) from the balls."""
    threshold = 3 * d.n if threshold is None else threshold
    dist = ball_distances(d)
    idx = d.complex.index
    return {t for t in d.bar.tiles() if dist[idx[t]] >= threshold}


@dataclass(frozen=True)
class UniformityReport:
    qualifying_tiles: frozenset
    max_deviation: float
    violating_tiles: frozenset
    height: float
    tol: float

    @property
    def passed(self) -> bool:
        return not self.violating_tiles

    def to_json(self) -> dict:
        return {
            "passed": self.passed,
            "height": float(self.height),
            "max_deviation": float(self.max_deviation),
            "relative_deviation": float(self.max_deviation) / float(self.height) if self.height else None,
            "tol": self.tol,
            "qualifying_tiles": [list(t) for t in sorted(self.qualifying_tiles)],
            "violating_tiles": [list(t) for t in sorted(self.violating_tiles)],
        }


def check_virtually_bar_uniform(d: Dumbbell, rho, tol: float = 1e-7, tiles=None) -> UniformityReport:
    """Compare ``rho`` on the middle bar tiles (or ``tiles``) against ``H_rho / n``."""
    from .solver import height

    c = d.complex
    w = weight_array(c, rho)
    H = height(c, w)
    target = H / d.n if not isinstance(H, Fraction) else H / Fraction(d.n)
    qual = frozenset(middle_tiles(d) if tiles is None else tiles)
    worst = 0
    bad = set()
    for t in qual:
        dev = abs(w[c.index[t]] - target)
        worst = max(worst, dev)
        if dev > tol * H:
            bad.add(t)
    return UniformityReport(qual, worst, frozenset(bad), H, tol)
