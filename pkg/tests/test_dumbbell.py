import json
import random

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import oracles
from sqrect.dumbbell import (
    AttachmentNotConnected,
    Bar,
    BarTooShort,
    Dumbbell,
    NotADisk,
    build_dumbbell,
    check_virtually_bar_uniform,
    middle_tiles,
    subdivide_dumbbell,
)
from sqrect.shapes import fig1_dumbbell, fig7_tray, random_dumbbell
from sqrect.solver import solve_optimal


def bfs_middle(d, threshold=None):
    threshold = 3 * d.n if threshold is None else threshold
    tiles = set(d.complex.tiles)
    balls = d.left_ball | d.right_ball
    return {t for t in d.bar.tiles() if oracles.skinny_hops(tiles, [t], balls) >= threshold}


def test_fig1_builds():
    d = fig1_dumbbell()
    assert d.n == 1 and d.bar.width == 8
    assert len(d.left_ball) == len(d.right_ball) == 13
    assert set(d.complex.tiles) == d.bar.tiles() | d.left_ball | d.right_ball
    assert oracles.euler_characteristic(set(d.complex.tiles)) == 1


def test_build_errors():
    with pytest.raises(BarTooShort):
        build_dumbbell(Bar((0, 0), 5, 1), {(-1, 0)}, {(5, 0)})
    with pytest.raises(BarTooShort):
        build_dumbbell(Bar((0, 0), 11, 2))
    # a ball tile resting on top of the bar
    with pytest.raises(AttachmentNotConnected):
        build_dumbbell(Bar((0, 0), 6, 1), {(-1, 0), (-1, 1), (0, 1)})
    # attachment rows 0 and 2 with a gap between them
    with pytest.raises((AttachmentNotConnected, NotADisk)):
        build_dumbbell(Bar((0, 0), 18, 3), {(-1, 0), (-1, 2), (-2, 0), (-2, 1), (-2, 2)})


def test_empty_balls_make_a_rectangle():
    d = build_dumbbell(Bar((0, 0), 6, 1))
    assert len(d.complex) == 6 and not d.left_ball and not d.right_ball
    assert middle_tiles(d) == d.bar.tiles()


def test_fig1_middle_tiles():
    d = fig1_dumbbell()
    mid = middle_tiles(d)
    assert mid == {(x, 0) for x in range(2, 6)}
    assert mid == bfs_middle(d)


def test_short_bar_with_full_attachments():
    d = build_dumbbell(Bar((0, 0), 12, 2), {(-1, 0), (-1, 1)}, {(12, 0), (12, 1)})
    mid = middle_tiles(d)
    assert mid == bfs_middle(d)
    assert mid == {(x, y) for x in range(5, 7) for y in (0, 1)}


@settings(max_examples=25)
@given(st.integers(0, 10**6))
def test_middle_tiles_match_bfs(seed):
    d = random_dumbbell(random.Random(seed), max_ball=12)
    assert middle_tiles(d) == bfs_middle(d)
    assert middle_tiles(d, threshold=2) == bfs_middle(d, 2)


def test_uniform_weights_pass():
    d = fig1_dumbbell()
    rho = np.ones(len(d.complex))
    rep = check_virtually_bar_uniform(d, rho)
    assert rep.passed and rep.max_deviation == 0 and rep.height == 1


@pytest.mark.parametrize("make", [fig1_dumbbell, fig7_tray])
def test_optimal_weights_pass_and_perturbation_fails(make):
    d = make()
    r = solve_optimal(d.complex)
    rho = r.rho.as_floats()
    rep = check_virtually_bar_uniform(d, rho)
    assert rep.passed, rep.to_json()
    H = rep.height
    t = sorted(rep.qualifying_tiles)[0]
    bumped = rho.copy()
    bumped[d.complex.index[t]] += H / (2 * d.n)
    rep2 = check_virtually_bar_uniform(d, bumped)
    assert not rep2.passed and t in rep2.violating_tiles
    assert rep2.max_deviation == pytest.approx(H / (2 * d.n), rel=1e-6)


def test_subdivision_doubles_the_bar():
    d = fig1_dumbbell()
    s = subdivide_dumbbell(d)
    assert s.n == 2 and s.bar.width == 16 and s.bar.width >= 6 * s.n
    assert len(s.complex) == 4 * len(d.complex)
    assert set(s.complex.tiles) == s.bar.tiles() | s.left_ball | s.right_ball
    assert subdivide_dumbbell(d, 0) is d
    # children of tiles at distance >= 6n from the balls stay in the middle
    d = build_dumbbell(Bar((0, 0), 14, 1), {(-1, 0), (-2, 0)}, {(14, 0)})
    s = subdivide_dumbbell(d)
    far = {t for t in d.bar.tiles()
           if oracles.skinny_hops(set(d.complex.tiles), [t], d.left_ball | d.right_ball) >= 6 * d.n}
    assert far == {(x, 0) for x in range(5, 9)}
    kids = {(2 * x + i, 2 * y + j) for x, y in far for i in (0, 1) for j in (0, 1)}
    assert kids <= middle_tiles(s)


def test_json_round_trip():
    for d in (fig1_dumbbell(), fig7_tray(), random_dumbbell(random.Random(3))):
        again = Dumbbell.from_json(json.loads(d.dumps()))
        assert again == d
