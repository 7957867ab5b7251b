"""Squared-rectangle layouts of optimal weight functions.

Each positive-weight tile becomes a square whose side is its weight. The
square's top edge sits at the least fat rho-distance from the top arc to the
tile (excluding the tile itself) and its left edge at the least skinny
rho-distance from the left arc.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional
from xml.sax.saxutils import escape

import numpy as np

from . import kernels
from .grid import GridComplex


class NotOptimal(ValueError):
    """The layout failed validation, so the weights cannot be optimal."""

    def __init__(self, msg, report=None):
        super().__init__(msg)
        self.report = report


@dataclass(frozen=True)
class Square:
    tile: tuple[int, int]
    x: object
    y: object
    side: object


@dataclass
class SquaredLayout:
    width: object
    height: object
    squares: list = field(default_factory=list)
    collapsed: list = field(default_factory=list)  # zero-weight tiles
    exact: bool = False

    @property
    def area(self):
        zero = Fraction(0) if self.exact else 0.0
        return sum((s.side * s.side for s in self.squares), zero)

    def arrays(self):
        x = np.array([float(s.x) for s in self.squares])
        y = np.array([float(s.y) for s in self.squares])
        side = np.array([float(s.side) for s in self.squares])
        return x, y, side


def _node_distances(graph, w, sources):
    indptr, indices = graph
    dist, _ = kernels.node_dijkstra(indptr, indices, w, sources)
    return dist


def arc_touching(c: GridComplex, name: str) -> np.ndarray:
    """Indices of tiles that meet the named arc in at least a point."""
    verts = {v for e in c.arcs[name] for v in e}
    hit = set()
    for x, y in verts:
        for t in ((x, y), (x - 1, y), (x, y - 1), (x - 1, y - 1)):
            if t in c.index:
                hit.add(c.index[t])
    return np.array(sorted(hit), dtype=np.int64)


def layout_squares(c: GridComplex, r, exact: Optional[bool] = None, validate: bool = True,
                   tol: float = 1e-9, samples: int = 512) -> SquaredLayout:
    """Place one square per positive-weight tile.

    ``r`` is a solver result (or anything with ``rho`` and optional
    ``exact`` weight functions). Exact weights give an exact layout.
    """
    if exact is None:
        exact = getattr(r, "exact", None) is not None
    wf = r.exact if exact else r.rho
    if exact:
        w = np.array(list(wf.values), dtype=object)
    else:
        w = np.asarray(wf.as_floats(), dtype=float)
    top = _node_distances(c.fat_graph, w, c.arc_indices("top"))
    left = _node_distances(c.skinny_graph, w, arc_touching(c, "left"))
    H = min(top[i] for i in c.arc_indices("bottom"))
    A = sum(v * v for v in w)
    # weights this small relative to the height are solver noise, not squares
    floor = 0 if exact else 1e-12 * float(H)
    squares, collapsed = [], []
    for i, t in enumerate(c.tiles):
        if w[i] <= floor:
            collapsed.append(Square(t, left[i] - w[i], top[i] - w[i], 0 if exact else 0.0))
        else:
            squares.append(Square(t, left[i] - w[i], top[i] - w[i], w[i]))
    lay = SquaredLayout(A / H, H, squares, collapsed, exact)
    if validate:
        rep = validate_layout(lay, tol=tol, samples=samples)
        if not rep.passed:
            raise NotOptimal(f"layout failed validation: {rep.summary()}", rep)
    return lay


@dataclass(frozen=True)
class LayoutReport:
    area_residual: float
    max_overlap: float
    uncovered: int
    out_of_bounds: float
    tol: float
    samples: int

    @property
    def passed(self) -> bool:
        return (
            self.area_residual <= self.tol
            and self.max_overlap <= self.tol
            and self.uncovered == 0
            and self.out_of_bounds <= self.tol
        )

    def summary(self) -> str:
        return (
            f"area residual {self.area_residual:.3e}, max overlap {self.max_overlap:.3e}, "
            f"uncovered {self.uncovered}/{self.samples ** 2}, out of bounds {self.out_of_bounds:.3e}"
        )

    def to_json(self) -> dict:
        return {
            "passed": self.passed,
            "area_residual": float(self.area_residual),
            "max_overlap": float(self.max_overlap),
            "uncovered": self.uncovered,
            "out_of_bounds": float(self.out_of_bounds),
            "tol": self.tol,
            "samples": self.samples,
        }


def _exact_max_overlap(sq) -> Fraction:
    worst = Fraction(0)
    for i in range(len(sq)):
        a = sq[i]
        for b in sq[i + 1:]:
            ox = min(a.x + a.side, b.x + b.side) - max(a.x, b.x)
            oy = min(a.y + a.side, b.y + b.side) - max(a.y, b.y)
            if ox > 0 and oy > 0:
                worst = max(worst, ox * oy)
    return worst


def _float_max_overlap(x, y, s, block: int = 1024) -> float:
    worst = 0.0
    n = len(x)
    for lo in range(0, n, block):
        hi = min(n, lo + block)
        ox = np.minimum(x[lo:hi, None] + s[lo:hi, None], x[None, :] + s[None, :]) - np.maximum(x[lo:hi, None], x[None, :])
        oy = np.minimum(y[lo:hi, None] + s[lo:hi, None], y[None, :] + s[None, :]) - np.maximum(y[lo:hi, None], y[None, :])
        ov = np.clip(ox, 0, None) * np.clip(oy, 0, None)
        # ignore each square's overlap with itself and count each pair once
        ov[np.arange(n)[None, :] <= np.arange(lo, hi)[:, None]] = 0.0
        worst = max(worst, float(ov.max(initial=0.0)))
    return worst


def _uncovered(x, y, s, W, H, samples: int, slack: float) -> int:
    """Count sample points (cell centres of a ``samples``-square grid) not in any closed square."""
    if W <= 0 or H <= 0:
        return samples * samples
    dx, dy = W / samples, H / samples
    i0 = np.ceil((x - slack) / dx - 0.5).astype(int).clip(0, samples)
    i1 = np.floor((x + s + slack) / dx - 0.5).astype(int).clip(-1, samples - 1) + 1
    j0 = np.ceil((y - slack) / dy - 0.5).astype(int).clip(0, samples)
    j1 = np.floor((y + s + slack) / dy - 0.5).astype(int).clip(-1, samples - 1) + 1
    diff = np.zeros((samples + 1, samples + 1), dtype=np.int64)
    ok = (i1 > i0) & (j1 > j0)
    np.add.at(diff, (i0[ok], j0[ok]), 1)
    np.add.at(diff, (i1[ok], j0[ok]), -1)
    np.add.at(diff, (i0[ok], j1[ok]), -1)
    np.add.at(diff, (i1[ok], j1[ok]), 1)
    cover = diff.cumsum(0).cumsum(1)[:samples, :samples]
    return int((cover == 0).sum())


def validate_layout(l: SquaredLayout, tol: float = 1e-9, samples: int = 512) -> LayoutReport:
    """Area conservation, pairwise overlap, containment and sampled coverage."""
    x, y, s = l.arrays()
    W, H = float(l.width), float(l.height)
    if l.exact:
        area_res = abs(l.area - l.width * l.height)
        overlap = _exact_max_overlap(l.squares)
        oob = max(
            [Fraction(0)]
            + [max(-q.x, -q.y, q.x + q.side - l.width, q.y + q.side - l.height) for q in l.squares]
        )
    else:
        area_res = abs(float(np.dot(s, s)) - W * H)
        overlap = _float_max_overlap(x, y, s)
        oob = max(0.0, float(np.max(np.concatenate([-x, -y, x + s - W, y + s - H]), initial=0.0)))
    uncovered = _uncovered(x, y, s, W, H, samples, slack=max(tol, 1e-12) * max(W, H, 1.0))
    return LayoutReport(float(area_res), float(overlap), uncovered, float(oob), tol, samples)


# ---------------------------------------------------------------------------
# output


def _num(v, exact):
    return str(v) if exact else float(v)


def emit_json(l: SquaredLayout) -> dict:
    doc = {
        "rect": [_num(l.width, l.exact), _num(l.height, l.exact)],
        "exact": l.exact,
        "squares": [
            {"tile": list(q.tile), "x": _num(q.x, l.exact), "y": _num(q.y, l.exact), "s": _num(q.side, l.exact)}
            for q in l.squares + l.collapsed
        ],
    }
    return doc


def layout_from_json(doc) -> SquaredLayout:
    exact = bool(doc.get("exact", False))
    conv = Fraction if exact else float
    squares, collapsed = [], []
    for e in doc["squares"]:
        q = Square(tuple(e["tile"]), conv(e["x"]), conv(e["y"]), conv(e["s"]))
        (squares if q.side > 0 else collapsed).append(q)
    w, h = doc["rect"]
    return SquaredLayout(conv(w), conv(h), squares, collapsed, exact)


def dumps(l: SquaredLayout) -> str:
    return json.dumps(emit_json(l), indent=1)


def emit_svg(l: SquaredLayout, path=None, size: float = 800.0, labels: bool = False) -> str:
    """Render the layout; squares get 1px strokes, collapsed tiles are skipped."""
    W, H = float(l.width), float(l.height)
    scale = size / max(W, H)
    pad = 2
    out = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{W * scale + 2 * pad:.3f}" '
        f'height="{H * scale + 2 * pad:.3f}">',
        f'<rect x="{pad}" y="{pad}" width="{W * scale:.6f}" height="{H * scale:.6f}" fill="white" stroke="black" stroke-width="1"/>',
    ]
    for q in sorted(l.squares, key=lambda q: q.tile):
        sx, sy, ss = float(q.x) * scale + pad, float(q.y) * scale + pad, float(q.side) * scale
        out.append(
            f'<rect x="{sx:.6f}" y="{sy:.6f}" width="{ss:.6f}" height="{ss:.6f}" '
            f'fill="#dde6f5" stroke="black" stroke-width="1"/>'
        )
        if labels and ss > 12:
            out.append(
                f'<text x="{sx + ss / 2:.3f}" y="{sy + ss / 2:.3f}" font-size="{min(ss / 4, 12):.2f}" '
                f'text-anchor="middle" dominant-baseline="middle">{escape(str(q.tile))}</text>'
            )
    out.append("</svg>")
    text = "\n".join(out) + "\n"
    if path is not None:
        try:
            with open(path, "w") as fh:
                fh.write(text)
        except OSError as exc:
            raise IoFailure(f"cannot write {path}: {exc}") from exc
    return text


class IoFailure(OSError):
    pass
