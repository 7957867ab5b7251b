from fractions import Fraction as F

import numpy as np
import pytest
from hypothesis import given, settings

import oracles
from sqrect.grid import rectangle
from sqrect.shapes import fig1_dumbbell
from sqrect.solver import (
    ModulusResult,
    TooManyPaths,
    WeightFunction,
    area,
    brute_force_optimal,
    certify,
    enumerate_crossing_paths,
    height,
    normalize,
    solve_optimal,
)
from strategies import quadrilaterals


def test_height_examples():
    for n, m in [(1, 1), (2, 3), (4, 2)]:
        r = rectangle(n, m)
        assert height(r, np.full(len(r), 3 / n)) == pytest.approx(3)
    assert height(rectangle(1, 1), [5.0]) == 5
    d = fig1_dumbbell()
    assert height(d.complex, np.ones(len(d.complex))) == 1


def test_area_examples():
    r = rectangle(3, 4)
    assert area(np.full(len(r), 1 / 3)) == pytest.approx(4 / 3)
    assert area([3.0]) == 9
    assert area([0.0, 0.0]) == 0
    assert area(WeightFunction([(0, 0), (1, 0)], [F(1, 2), F(1, 3)], exact=True)) == F(13, 36)


def test_single_tile():
    r = solve_optimal(rectangle(1, 1))
    assert r.modulus == pytest.approx(1, abs=1e-12)
    assert r.rho[(0, 0)] == pytest.approx(1, abs=1e-12)


def test_two_by_three_rectangle():
    c = rectangle(2, 3)
    r = solve_optimal(c, exact=True)
    assert r.modulus == pytest.approx(2 / 3, abs=1e-12)
    assert np.allclose(r.rho.as_floats(), 0.5, atol=1e-12)
    assert set(r.exact.values) == {F(1, 2)}
    assert r.to_json()["modulus_exact"] == "2/3"


@pytest.mark.parametrize("n,m", [(1, 2), (2, 2), (3, 1), (3, 5), (5, 3)])
def test_rectangle_law(n, m):
    r = solve_optimal(rectangle(n, m))
    assert r.modulus == pytest.approx(n / m, abs=1e-9)
    assert np.abs(r.rho.as_floats() - 1 / n).max() <= 1e-8


def test_brute_force_examples():
    r = brute_force_optimal(rectangle(2, 2))
    assert r.modulus == pytest.approx(1, abs=1e-10)
    assert np.allclose(r.rho.as_floats(), 0.5, atol=1e-10)
    strip = brute_force_optimal(rectangle(1, 3))
    assert strip.modulus == pytest.approx(1 / 3, abs=1e-10)
    assert np.allclose(strip.rho.as_floats(), 1, atol=1e-10)
    assert brute_force_optimal(rectangle(1, 1)).modulus == pytest.approx(1)
    with pytest.raises(TooManyPaths):
        brute_force_optimal(rectangle(6, 6), cap=100)


def test_crossing_path_count():
    # a path switching columns in a 2x2 block runs along the top row and contains a column
    assert sorted(map(sorted, enumerate_crossing_paths(rectangle(2, 2)))) == [[0, 1], [2, 3]]
    assert len(enumerate_crossing_paths(rectangle(1, 3))) == 3


@given(quadrilaterals(max_tiles=9))
def test_enumeration_matches_minimal_paths(c):
    ours = {frozenset(c.tiles[i] for i in p) for p in enumerate_crossing_paths(c)}
    minimal = set(oracles.crossing_paths(c))
    assert minimal <= ours
    assert all(any(q <= p for q in minimal) for p in ours)


def test_certificates():
    c = rectangle(2, 2)
    r = solve_optimal(c)
    cert = certify(c, r)
    assert cert.support_ok and cert.flow_ok and cert.ok
    assert cert.gap <= 1e-8
    # a weight on a tile off every minimal path
    vals = r.rho.as_floats().copy()
    vals[c.index[(0, 0)]] = 1.0
    bad = ModulusResult(WeightFunction(c.tiles, vals), 1.0, float(vals @ vals), 1 / float(vals @ vals))
    cert = certify(c, bad)
    assert not cert.support_ok and not cert.ok
    u = rectangle(3, 4)
    assert certify(u, solve_optimal(u)).support_ok


def test_normalizations_are_proportional():
    d = fig1_dumbbell()
    one = solve_optimal(d.complex, exact=True)
    integer = normalize(one, "integer")
    assert integer.normalization == "integer"
    assert all(v.denominator == 1 for v in integer.exact.values)
    ratio = integer.exact.values[0] / one.exact.values[0]
    assert [v * ratio for v in one.exact.values] == list(integer.exact.values)
    assert np.allclose(integer.rho.as_floats(), one.rho.as_floats() * float(ratio), rtol=1e-12)
    assert integer.modulus == one.modulus
    with pytest.raises(ValueError):
        normalize(one, "bogus")


def test_fig1_exact_modulus():
    r = solve_optimal(fig1_dumbbell().complex, exact=True)
    assert r.to_json()["modulus_exact"] == "15/206"
    assert r.modulus == pytest.approx(15 / 206, abs=1e-12)


def test_bad_options():
    with pytest.raises(ValueError):
        solve_optimal(rectangle(1, 1), tol_feas=0)
    with pytest.raises(ValueError):
        solve_optimal(rectangle(1, 1), normalization="unit")


@settings(max_examples=40)
@given(quadrilaterals(max_tiles=8))
def test_matches_independent_qp(c):
    r = solve_optimal(c)
    M, w = oracles.qp_modulus(c, oracles.crossing_paths(c))
    assert r.modulus == pytest.approx(M, rel=1e-6)
    # the oracle answer has height one, like the solver's default
    assert np.abs(r.rho.as_floats() - w).max() <= 1e-5


@settings(max_examples=40)
@given(quadrilaterals(max_tiles=9))
def test_optimum_is_feasible_on_every_path(c):
    r = solve_optimal(c)
    rho = r.rho.as_floats()
    lengths = [rho[p].sum() for p in enumerate_crossing_paths(c)]
    assert min(lengths) >= r.height - 1e-9
    assert min(lengths) == pytest.approx(r.height, abs=1e-9)
    assert r.area == pytest.approx(float(rho @ rho))
