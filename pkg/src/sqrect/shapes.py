"""Fixture shapes and random generators for tests and the CLI."""

from __future__ import annotations

import random

from .dumbbell import Bar, Dumbbell, DumbbellError, build_dumbbell
from .grid import ComplexError, GridComplex, boundary_circuit, build_complex, _euler_characteristic

_STEPS = ((-1, 0), (1, 0), (0, -1), (0, 1))


def _diamond(x_from: int, step: int, heights=(1, 3, 5, 3, 1)):
    tiles = set()
    for i, h in enumerate(heights):
        x = x_from + step * i
        for y in range(-(h // 2), h // 2 + 1):
            tiles.add((x, y))
    return tiles


def fig1_dumbbell() -> Dumbbell:
    """Bar of height 1 and width 8 between two diamond-shaped balls."""
    return build_dumbbell(Bar((0, 0), 8, 1), _diamond(-1, -1), _diamond(8, 1))


def d1_ell() -> GridComplex:
    """Three-tile L whose left edge is the top of its upper tile."""
    return build_complex({(0, 0), (0, 1), (1, 0)}, ((1, 2), (2, 1), (2, 0), (0, 2)))


def fig7_tray() -> Dumbbell:
    """Bar 8x1 with a raised tile at each end; the left edge is the top of the left ball."""
    return build_dumbbell(
        Bar((0, 0), 8, 1),
        {(-1, 0), (-1, 1)},
        {(8, 0), (8, 1)},
        corners=((0, 2), (8, 2), (9, 2), (-1, 2)),
    )


def _grow(rng: random.Random, tiles: set, seeds: set, size: int, allowed) -> set:
    """Grow ``size`` tiles outward from ``seeds`` keeping ``tiles | grown`` hole-free."""
    grown = set(seeds)
    tries = 0
    while len(grown) < size and tries < 50 * size:
        tries += 1
        frontier = sorted(
            {(x + dx, y + dy) for x, y in grown for dx, dy in _STEPS} - grown - tiles
        )
        frontier = [u for u in frontier if allowed(u)]
        if not frontier:
            break
        u = rng.choice(frontier)
        if _euler_characteristic(tiles | grown | {u}) == 1:
            try:
                boundary_circuit(tiles | grown | {u})
            except ComplexError:
                continue
            grown.add(u)
    return grown


def random_dumbbell(rng: random.Random, n=None, w=None, max_ball: int = 40) -> Dumbbell:
    """Dumbbell with bar height 1-3, width 6n-12n and grown balls of at most ``max_ball`` tiles."""
    while True:
        nn = n if n is not None else rng.randint(1, 3)
        ww = w if w is not None else rng.randint(6 * nn, 12 * nn)
        bar = Bar((0, 0), ww, nn)
        bar_tiles = bar.tiles()
        balls = []
        for side in ("left", "right"):
            size = rng.choice([0] + list(range(1, max_ball + 1)) * 3)
            if size == 0:
                balls.append(set())
                continue
            x_att = -1 if side == "left" else ww
            lo = rng.randint(0, nn - 1)
            hi = rng.randint(lo, nn - 1)
            seeds = {(x_att, y) for y in range(lo, hi + 1)}
            if len(seeds) > size:
                seeds = set(sorted(seeds)[:size])

            def allowed(u, side=side, x_att=x_att):
                x, y = u
                if side == "left" and x > x_att or side == "right" and x < x_att:
                    return False
                # new tiles may not widen the attachment
                return not (x == x_att and 0 <= y < nn)

            others = bar_tiles | (balls[0] if balls else set())
            balls.append(_grow(rng, others, seeds, size, allowed))
        try:
            return build_dumbbell(bar, balls[0], balls[1])
        except DumbbellError:
            continue


def random_polyomino(rng: random.Random, size: int) -> set:
    return _grow(rng, set(), {(0, 0)}, size, lambda u: True)


def random_quadrilateral(rng: random.Random, max_tiles: int = 10, min_tiles: int = 1) -> GridComplex:
    """Random hole-free polyomino with four random boundary vertices as corners."""
    tiles = random_polyomino(rng, rng.randint(min_tiles, max_tiles))
    circuit, _ = boundary_circuit(tiles)
    verts = [e[0] for e in circuit]
    pick = sorted(rng.sample(range(len(verts)), 4))
    # circuit order is clockwise, so sorted picks give a, b, c, d in order
    corners = tuple(verts[i] for i in pick)
    return build_complex(tiles, corners)
