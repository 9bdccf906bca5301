from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import oracles
from conftest import horofunctions, points
from horostar import (
    DimensionError,
    DirectionalType,
    Horofunction,
    classify_directional,
    interpolate_to_geodesic,
    is_geodesic_chain,
    normal_form_geodesic,
    sup_dist,
)
from horostar.sup import add, point, scalar, sup_norm

F = Fraction


def test_sup_dist_examples():
    assert sup_dist((3, 4), (1, 1)) == 3
    assert sup_dist((F(7, 3), 2), (F(7, 3), 2)) == 0
    assert sup_dist((0, 0), (-2, 5)) == 5


def test_dimension_mismatch_raises():
    with pytest.raises(DimensionError):
        sup_dist((0, 0), (1, 2, 3))


def test_string_scalars_become_exact():
    assert scalar("1/3") == F(1, 3)
    assert point("1/2", 2) == (F(1, 2), 2)
    assert sup_norm(point("-5/2", 1)) == F(5, 2)


def test_chain_examples():
    northerly = [(0, 0), (F(13, 10), 2), (F(-1, 5), F(19, 5))]
    assert is_geodesic_chain(northerly, tol=0)
    assert not is_geodesic_chain([(0, 0), (1, 1), (0, 0)])
    assert is_geodesic_chain([(0, 0), (2, 1), (4, 0)], tol=0)


def test_chain_needs_three_points():
    with pytest.raises(ValueError):
        is_geodesic_chain([(0, 0), (1, 1)])


def test_repeated_points_allowed_in_chain():
    assert is_geodesic_chain([(0, 0), (0, 0), (3, 1)])


def test_classify_examples():
    northerly = [(0, 0), (F(13, 10), 2), (F(-1, 5), F(19, 5))]
    assert classify_directional(northerly) == DirectionalType(2, 1)
    assert classify_directional(northerly).compass == "N"
    assert classify_directional([(0, 0), (3, 1)]) == DirectionalType(1, 1)
    assert classify_directional([(0, 0), (1, 1), (0, 0)]) is None


def test_classify_tie_break_and_witnesses():
    diag = [(0, 0), (1, 1), (2, 2)]
    assert classify_directional(diag) == DirectionalType(1, 1)
    assert classify_directional(diag, all_witnesses=True) == [DirectionalType(1, 1), DirectionalType(2, 1)]


def test_classify_rejects_repeated_points():
    assert classify_directional([(0, 0), (0, 0), (1, 0)]) is None


def test_interpolation_of_northerly_sequence():
    pts = [(0, 0), (F(13, 10), 2), (F(-1, 5), F(19, 5))]
    path = interpolate_to_geodesic(pts)
    sample = path.sample([0, 1, 2])
    assert sample == [(0, 0), (F(13, 20), 1), (F(13, 10), 2)]
    assert is_geodesic_chain(sample, tol=0)
    assert path.length == F(19, 5)


def test_interpolation_simple_cases():
    seg = interpolate_to_geodesic([(0, 0), (0, 5)])
    assert seg(F(5, 2)) == (0, F(5, 2))
    path = interpolate_to_geodesic([(0, 0), (2, 2), (2, 4)])
    assert path(2) == (2, 2)
    assert is_geodesic_chain(path.sample([0, 1, 2, 3, 4]), tol=0)
    with pytest.raises(ValueError):
        interpolate_to_geodesic([(0, 0), (1, 1), (0, 0)])


def test_normal_form_examples():
    ne2 = Horofunction(2, (1, 2), (-1, -1), (2, 0))
    gamma = normal_form_geodesic(ne2)
    assert gamma(1) == (0, 1)
    assert gamma(5) == (3, 5)
    north = normal_form_geodesic(Horofunction(2, (2,), (-1,), (0,)))
    assert north(F(7, 2)) == (0, F(7, 2))
    three = normal_form_geodesic(Horofunction(3, (1, 2), (-1, -1), (0, 1)))
    assert three(2) == (2, 1, 0)
    with pytest.raises(ValueError):
        gamma(-1)


@settings(max_examples=400)
@given(st.integers(1, 5).flatmap(lambda n: st.tuples(points(n), points(n), points(n))))
def test_metric_axioms_exact(triple):
    p, q, r = triple
    assert sup_dist(p, q) >= 0
    assert (sup_dist(p, q) == 0) == (p == q)
    assert sup_dist(p, q) == sup_dist(q, p)
    assert sup_dist(p, r) <= sup_dist(p, q) + sup_dist(q, r)


def test_metric_axioms_on_ten_thousand_triples(rng):
    for _ in range(10_000):
        n = int(rng.integers(1, 6))
        p, q, r = (tuple(F(int(v), int(d)) for v, d in zip(rng.integers(-99, 99, n), rng.integers(1, 9, n)))
                   for _ in range(3))
        dpq, dqr, dpr = sup_dist(p, q), sup_dist(q, r), sup_dist(p, r)
        assert dpq == sup_dist(q, p) == oracles.sup_dist(p, q)
        assert dpr <= dpq + dqr
        assert (dpq == 0) == (p == q)


@given(st.integers(1, 5).flatmap(lambda n: st.tuples(points(n), points(n), points(n))))
def test_translation_invariance(triple):
    p, q, v = triple
    assert sup_dist(add(p, v), add(q, v)) == sup_dist(p, q)


@settings(max_examples=200)
@given(horofunctions(), st.lists(st.fractions(0, 60, max_denominator=7), min_size=3, max_size=12))
def test_normal_form_is_geodesic_and_directional(h, ts):
    ts = sorted(set(ts))
    if len(ts) < 3:
        ts = [0, 1, 2]
    sample = normal_form_geodesic(h).sample(ts)
    assert is_geodesic_chain(sample, tol=0)
    assert classify_directional(sample) is not None
