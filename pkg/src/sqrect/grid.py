"""Square-tiled quadrilaterals.

A complex is a finite set of unit lattice squares, each named by the lattice
point ``(col, row)`` of its lower-left corner, together with four marked
boundary vertices ``a, b, c, d`` in clockwise order. The boundary arcs are
top ``a->b``, right ``b->c``, bottom ``c->d`` and left ``d->a``.

Two tiles are *fat* neighbours when they share an edge and *skinny*
neighbours when they share at least a point.
"""

from __future__ import annotations

import json
from collections import deque
from collections.abc import Iterable, Mapping
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property

import numpy as np

from . import kernels

Tile = tuple[int, int]
Vertex = tuple[int, int]
Edge = tuple[Vertex, Vertex]

ARC_NAMES = ("top", "right", "bottom", "left")

_FAT_STEPS = ((-1, 0), (0, -1), (0, 1), (1, 0))
_SKINNY_STEPS = ((-1, -1), (-1, 0), (-1, 1), (0, -1), (0, 1), (1, -1), (1, 0), (1, 1))


class ComplexError(ValueError):
    """Invalid quadrilateral description."""


class NotConnected(ComplexError):
    pass


class HasHoles(ComplexError):
    pass


class CornersNotOnBoundary(ComplexError):
    pass


class CornersNotClockwise(ComplexError):
    pass


class UnknownTile(KeyError):
    pass


@dataclass(frozen=True)
class BoundaryArcs:
    """Boundary edges of the four sides, each listed in clockwise order."""

    top: tuple[Edge, ...]
    right: tuple[Edge, ...]
    bottom: tuple[Edge, ...]
    left: tuple[Edge, ...]

    def __getitem__(self, name: str) -> tuple[Edge, ...]:
        if name not in ARC_NAMES:
            raise KeyError(name)
        return getattr(self, name)


def _tile_boundary_edges(t: Tile):
    """The four sides of a tile, directed clockwise (interior on the right)."""
    c, r = t
    return (
        ((c, r + 1), (c + 1, r + 1)),  # top, heading east
        ((c + 1, r + 1), (c + 1, r)),  # right, heading south
        ((c + 1, r), (c, r)),  # bottom, heading west
        ((c, r), (c, r + 1)),  # left, heading north
    )


_SIDE_OFFSETS = ((0, 1), (1, 0), (0, -1), (-1, 0))


class GridComplex:
    """An immutable, validated square-tiled quadrilateral.

    Use :func:`build_complex` to construct one.
    """

    def __init__(self, tiles, corners, boundary, edge_owner, arc_slices):
        self.tiles: tuple[Tile, ...] = tiles
        self.index: dict[Tile, int] = {t: i for i, t in enumerate(tiles)}
        self.corners: tuple[Vertex, Vertex, Vertex, Vertex] = corners
        self.boundary: tuple[Edge, ...] = boundary
        self._edge_owner = edge_owner
        self.arcs = BoundaryArcs(*(boundary[s] for s in arc_slices))

    def __len__(self):
        return len(self.tiles)

    def __iter__(self):
        return iter(self.tiles)

    def __contains__(self, t):
        return t in self.index

    def __eq__(self, other):
        if not isinstance(other, GridComplex):
            return NotImplemented
        return self.tiles == other.tiles and self.corners == other.corners

    def __hash__(self):
        return hash((self.tiles, self.corners))

    def __repr__(self):
        return f"GridComplex({len(self.tiles)} tiles, corners={self.corners})"

    def _check(self, t):
        if t not in self.index:
            raise UnknownTile(t)

    def fat_neighbors(self, t: Tile) -> set[Tile]:
        self._check(t)
        return {(t[0] + dx, t[1] + dy) for dx, dy in _FAT_STEPS if (t[0] + dx, t[1] + dy) in self.index}

    def skinny_neighbors(self, t: Tile) -> set[Tile]:
        self._check(t)
        return {(t[0] + dx, t[1] + dy) for dx, dy in _SKINNY_STEPS if (t[0] + dx, t[1] + dy) in self.index}

    def arc_tiles(self, name: str) -> list[Tile]:
        """Tiles with at least one edge on the named arc, in index order."""
        owners = {self._edge_owner[e] for e in self.arcs[name]}
        return sorted(owners)

    def arc_indices(self, name: str) -> np.ndarray:
        return np.array([self.index[t] for t in self.arc_tiles(name)], dtype=np.int64)

    def _csr(self, steps):
        indptr = [0]
        indices = []
        for t in self.tiles:
            nb = sorted(self.index[(t[0] + dx, t[1] + dy)] for dx, dy in steps if (t[0] + dx, t[1] + dy) in self.index)
            indices.extend(nb)
            indptr.append(len(indices))
        return np.array(indptr, dtype=np.int64), np.array(indices, dtype=np.int64)

    @cached_property
    def fat_graph(self) -> tuple[np.ndarray, np.ndarray]:
        """CSR ``(indptr, indices)`` of the edge-adjacency graph."""
        return self._csr(_FAT_STEPS)

    @cached_property
    def skinny_graph(self) -> tuple[np.ndarray, np.ndarray]:
        """CSR ``(indptr, indices)`` of the point-adjacency graph."""
        return self._csr(_SKINNY_STEPS)

    def bbox(self) -> tuple[int, int, int, int]:
        """``(xmin, ymin, xmax, ymax)`` of the union of tiles."""
        xs = [t[0] for t in self.tiles]
        ys = [t[1] for t in self.tiles]
        return min(xs), min(ys), max(xs) + 1, max(ys) + 1

    def to_json(self) -> dict:
        return {"tiles": [list(t) for t in self.tiles], "corners": [list(v) for v in self.corners]}

    @classmethod
    def from_json(cls, doc: Mapping) -> "GridComplex":
        try:
            tiles = {(int(c), int(r)) for c, r in doc["tiles"]}
            corners = tuple((int(x), int(y)) for x, y in doc["corners"])
        except (KeyError, TypeError, ValueError) as exc:
            raise ComplexError(f"malformed complex document: {exc}") from exc
        if len(corners) != 4:
            raise ComplexError("a complex needs exactly four corners")
        return build_complex(tiles, corners)

    def dumps(self) -> str:
        return json.dumps(self.to_json())


def _edge_key(e: Edge):
    a, b = e
    return (a, b) if a <= b else (b, a)


def _euler_characteristic(tiles) -> int:
    verts = set()
    edges = set()
    for c, r in tiles:
        verts.update(((c, r), (c + 1, r), (c, r + 1), (c + 1, r + 1)))
        edges.update((((c, r), (c + 1, r)), ((c, r + 1), (c + 1, r + 1)), ((c, r), (c, r + 1)), ((c + 1, r), (c + 1, r + 1))))
    return len(verts) - len(edges) + len(tiles)


def _edge_connected(tiles) -> bool:
    start = next(iter(tiles))
    seen = {start}
    queue = deque([start])
    while queue:
        c, r = queue.popleft()
        for dx, dy in _FAT_STEPS:
            u = (c + dx, r + dy)
            if u in tiles and u not in seen:
                seen.add(u)
                queue.append(u)
    return len(seen) == len(tiles)


def boundary_circuit(tiles) -> tuple[list[Edge], dict[Edge, Tile]]:
    """Clockwise boundary circuit of a disk-like union of tiles.

    Returns the directed edges in order (starting at the lexicographically
    smallest boundary vertex) and the owning tile of each edge.
    """
    tiles = set(tiles)
    succ: dict[Vertex, Edge] = {}
    owner: dict[Edge, Tile] = {}
    for t in tiles:
        for (dx, dy), e in zip(_SIDE_OFFSETS, _tile_boundary_edges(t)):
            if (t[0] + dx, t[1] + dy) in tiles:
                continue
            if e[0] in succ:
                raise HasHoles(f"boundary is pinched at vertex {e[0]}")
            succ[e[0]] = e
            owner[e] = t
    start = min(succ)
    circuit = []
    v = start
    while True:
        e = succ[v]
        circuit.append(e)
        v = e[1]
        if v == start:
            break
    if len(circuit) != len(succ):
        raise HasHoles("boundary is not a single circuit")
    return circuit, owner


def build_complex(tiles: Iterable[Tile], corners) -> GridComplex:
    """Validate tiles and clockwise corners ``(a, b, c, d)`` into a complex."""
    tiles = {(int(c), int(r)) for c, r in tiles}
    if not tiles:
        raise ComplexError("a complex needs at least one tile")
    corners = tuple((int(x), int(y)) for x, y in corners)
    if len(corners) != 4:
        raise ComplexError("a complex needs exactly four corners")
    if not _edge_connected(tiles):
        raise NotConnected("tiles are not edge-connected")
    chi = _euler_characteristic(tiles)
    if chi != 1:
        raise HasHoles(f"V - E + F = {chi}, expected 1")
    circuit, owner = boundary_circuit(tiles)
    position = {e[0]: i for i, e in enumerate(circuit)}
    missing = [v for v in corners if v not in position]
    if missing:
        raise CornersNotOnBoundary(f"corners {missing} are not boundary vertices")
    if len(set(corners)) != 4:
        raise CornersNotClockwise("corners must be four distinct vertices")
    # rotate so that the circuit starts at a
    shift = position[corners[0]]
    circuit = circuit[shift:] + circuit[:shift]
    pos = [(position[v] - shift) % len(circuit) for v in corners]
    if not pos[0] < pos[1] < pos[2] < pos[3]:
        raise CornersNotClockwise(f"corners {corners} are not in clockwise order")
    slices = (slice(pos[0], pos[1]), slice(pos[1], pos[2]), slice(pos[2], pos[3]), slice(pos[3], len(circuit)))
    return GridComplex(tuple(sorted(tiles)), corners, tuple(circuit), owner, slices)


def rectangle(rows: int, cols: int, origin: Tile = (0, 0)) -> GridComplex:
    """``rows x cols`` block of tiles with the obvious corners."""
    x0, y0 = origin
    tiles = {(x0 + i, y0 + j) for i in range(cols) for j in range(rows)}
    corners = ((x0, y0 + rows), (x0 + cols, y0 + rows), (x0 + cols, y0), (x0, y0))
    return build_complex(tiles, corners)


def extreme_corners(tiles) -> tuple[Vertex, Vertex, Vertex, Vertex]:
    """Default corners: top and bottom vertices of the west and east extremes.

    ``a``/``d`` are the highest/lowest boundary vertices on the westmost
    vertical line, ``b``/``c`` the highest/lowest on the eastmost line.
    """
    tiles = set(tiles)
    xmin = min(t[0] for t in tiles)
    xmax = max(t[0] for t in tiles) + 1
    west = [t[1] for t in tiles if t[0] == xmin]
    east = [t[1] for t in tiles if t[0] == xmax - 1]
    return (xmin, max(west) + 1), (xmax, max(east) + 1), (xmax, min(east)), (xmin, min(west))


def subdivide_binary(c: GridComplex) -> GridComplex:
    """Split every tile into four half-size tiles (coordinates doubled)."""
    tiles = {(2 * x + i, 2 * y + j) for x, y in c.tiles for i in (0, 1) for j in (0, 1)}
    corners = tuple((2 * x, 2 * y) for x, y in c.corners)
    return build_complex(tiles, corners)


def subdivide(c: GridComplex, level: int) -> GridComplex:
    if level < 0:
        raise ValueError("subdivision level must be nonnegative")
    for _ in range(level):
        c = subdivide_binary(c)
    return c


def _bfs(indptr, indices, sources, n):
    dist = np.full(n, -1, dtype=np.int64)
    queue = deque()
    for s in sources:
        if dist[s] < 0:
            dist[s] = 0
            queue.append(s)
    while queue:
        v = queue.popleft()
        for e in range(indptr[v], indptr[v + 1]):
            u = indices[e]
            if dist[u] < 0:
                dist[u] = dist[v] + 1
                queue.append(u)
    return dist


def skinny_distances(c: GridComplex, sources: Iterable[Tile]) -> np.ndarray:
    """Hop counts in the skinny graph from a tile set (``inf`` if unreachable)."""
    src = [c.index[t] for t in sources if t in c.index]
    indptr, indices = c.skinny_graph
    hops = _bfs(indptr, indices, src, len(c)).astype(float)
    hops[hops < 0] = np.inf
    return hops


def skinny_distance(c: GridComplex, A: Iterable[Tile], B: Iterable[Tile]) -> float:
    """One less than the fewest tiles in a skinny chain from a tile of A to a tile of B.

    Returns ``inf`` when either set is empty.
    """
    A = list(A)
    B = list(B)
    for t in A + B:
        c._check(t)
    if not A or not B:
        return float("inf")
    hops = skinny_distances(c, A)
    d = min(hops[c.index[t]] for t in B)
    return int(d) if np.isfinite(d) else float("inf")


def weight_array(c: GridComplex, rho) -> np.ndarray:
    """Align a weight function with ``c.tiles``.

    Accepts a mapping tile -> weight, an object exposing ``as_array(c)``, or
    an array already in tile order. Exact (Fraction) weights give an object
    array.
    """
    if hasattr(rho, "as_array"):
        return rho.as_array(c)
    if isinstance(rho, Mapping):
        vals = [rho[t] for t in c.tiles]
        if any(isinstance(v, Fraction) for v in vals):
            return np.array([Fraction(v) for v in vals], dtype=object)
        return np.array(vals, dtype=float)
    arr = np.asarray(rho)
    if arr.shape != (len(c),):
        raise ValueError(f"weight array has shape {arr.shape}, expected ({len(c)},)")
    if arr.dtype != object:
        arr = arr.astype(float)
    return arr


def fat_distances(c: GridComplex, rho, arc: str, backend=None):
    """Least rho-length of a fat path from the named arc to each tile (inclusive)."""
    w = weight_array(c, rho)
    indptr, indices = c.fat_graph
    return kernels.node_dijkstra(indptr, indices, w, c.arc_indices(arc), backend=backend)


def fat_shortest_path(c: GridComplex, rho, frm: str = "top", to: str = "bottom"):
    """Shortest fat path between two arcs as ``(length, [tiles])``.

    The length counts the weights of all path tiles including both ends.
    """
    dist, pred = fat_distances(c, rho, frm)
    targets = c.arc_indices(to)
    best = min(targets, key=lambda i: (dist[i], i))
    return dist[best], [c.tiles[i] for i in kernels.trace_path(pred, best)]
