"""Hypothesis strategies for tiles, complexes and weight vectors."""

import random
from fractions import Fraction

from hypothesis import strategies as st

from sqrect.shapes import random_polyomino, random_quadrilateral


@st.composite
def quadrilaterals(draw, max_tiles=10):
    seed = draw(st.integers(0, 2**32 - 1))
    return random_quadrilateral(random.Random(seed), max_tiles=max_tiles)


@st.composite
def polyominoes(draw, max_tiles=12):
    seed = draw(st.integers(0, 2**32 - 1))
    size = draw(st.integers(1, max_tiles))
    return random_polyomino(random.Random(seed), size)


def rationals(max_den=12, max_num=12):
    return st.builds(Fraction, st.integers(0, max_num), st.integers(1, max_den))


@st.composite
def weight_vectors(draw, min_n=1, max_n=8):
    n = draw(st.integers(min_n, max_n))
    comps = draw(st.lists(rationals(), min_size=n, max_size=n).filter(any))
    return comps
