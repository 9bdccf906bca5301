import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import assume, given, settings
from hypothesis import strategies as st

import oracles
from conftest import horofunctions, points, rationals
from horostar import (
    AffineSequence,
    Horofunction,
    UnnormalizedError,
    busemann_of_geodesic,
    eval_horofunction,
    horo_param_distance,
    limit_of_affine_sequence,
    limit_of_numeric_sequence,
    normal_form_geodesic,
    psi_gap,
    sup_dist,
)
from horostar.horo import BOUNDED, CONVERGES, NOT_CONVERGENT, affine_tail, grid_residual

F = Fraction
NE = lambda m: Horofunction.compass("NE", m)  # noqa: E731


def test_eval_examples():
    assert eval_horofunction(Horofunction(2, (2,), (-1,), (0,)), (3, 7)) == -7
    assert eval_horofunction(Horofunction(2, (1, 2), (-1, -1), (2, 0)), (1, 5)) == -3
    assert NE(2)((1, 5)) == -3


def test_compass_conventions():
    assert Horofunction.compass("NE", 3).expression() == "max(-x-3, -y)"
    assert Horofunction.compass("EN", 3).expression() == "max(-x, -y-3)"
    assert Horofunction.compass("W").expression() == "x"


@given(horofunctions())
def test_normalized_vanishes_at_origin(h):
    assert h((0,) * h.dim) == 0


def test_unnormalized_rejected():
    with pytest.raises(UnnormalizedError):
        Horofunction(2, (1, 2), (-1, -1), (1, 2))
    h = Horofunction.normalize(2, (1, 2), (-1, -1), (1, 2))
    assert h.offsets == (0, 1)
    with pytest.raises(ValueError):
        Horofunction(2, (3,), (1,), (0,))


def test_psi_examples():
    assert psi_gap((10, 0), (1, 1), (0, 0)) == -1
    assert psi_gap((10, 0), (0, 0)) == 0
    assert psi_gap((10**6, 0), (F(1, 2), 3)) == F(-1, 2)


def test_affine_limit_examples():
    east = limit_of_affine_sequence(AffineSequence((1, 0), (0, 0)))
    assert east.horofunction == Horofunction(2, (1,), (-1,), (0,))
    en3 = limit_of_affine_sequence(AffineSequence((1, 1), (0, -3))).horofunction
    assert en3 == Horofunction(2, (1, 2), (-1, -1), (0, 3))
    assert en3 == Horofunction.compass("EN", 3)
    es = limit_of_affine_sequence(AffineSequence((1, -1), (0, 3))).horofunction
    assert es == Horofunction(2, (1, 2), (-1, 1), (0, 3))
    for w in [(0, 0), (2, 5), (-3, 1), (F(1, 3), -7)]:
        assert es(w) == oracles.affine_limit_value((1, -1), (0, 3), w, 10**6)


def test_affine_sequence_rejects_zero_direction():
    with pytest.raises(ValueError):
        AffineSequence((0, 0), (1, 1))


@settings(max_examples=300)
@given(st.integers(1, 4).flatmap(lambda n: st.tuples(
    points(n, lo=-5, hi=5, max_den=4), points(n, lo=-20, hi=20), points(n, lo=-10, hi=10))))
def test_affine_limit_matches_large_index_oracle(data):
    a, b, w = data
    assume(any(a))
    h = limit_of_affine_sequence(AffineSequence(a, b)).horofunction
    assert h(w) == oracles.affine_limit_value(a, b, w)


@given(horofunctions(), st.data())
def test_one_lipschitz(h, data):
    z = data.draw(points(h.dim))
    w = data.draw(points(h.dim))
    assert abs(h(z) - h(w)) <= sup_dist(z, w)


def test_roundtrip_on_a_thousand_horofunctions(rng):
    for _ in range(1000):
        dim = int(rng.integers(1, 6))
        size = int(rng.integers(1, dim + 1))
        support = sorted(rng.choice(np.arange(1, dim + 1), size, replace=False).tolist())
        signs = rng.choice([-1, 1], size).tolist()
        offsets = [F(int(p), int(q)) for p, q in zip(rng.integers(0, 60, size), rng.integers(1, 9, size))]
        h = Horofunction.normalize(dim, support, signs, offsets)
        gamma = normal_form_geodesic(h)
        assert busemann_of_geodesic(gamma, math.floor(max(h.offsets)) + 1) == h


@given(horofunctions())
def test_serialization_roundtrip(h):
    assert Horofunction.from_json(h.to_json()) == h
    assert Horofunction.from_dict(h.to_dict()) == h


def test_busemann_examples():
    assert busemann_of_geodesic(normal_form_geodesic(NE(2)), 3) == NE(2)
    north = Horofunction.compass("N")
    assert busemann_of_geodesic(normal_form_geodesic(north), 1) == north
    target = Horofunction(3, (1, 2), (-1, -1), (0, 4))
    assert busemann_of_geodesic(normal_form_geodesic(target), 5) == target
    with pytest.raises(ValueError):
        busemann_of_geodesic(normal_form_geodesic(NE(2)), 2)


def test_affine_tail_is_the_ray_past_its_breakpoints():
    h = Horofunction(3, (1, 3), (1, -1), (F(5, 2), 0))
    tail = affine_tail(h)
    gamma = normal_form_geodesic(h)
    for n in range(3, 10):
        assert tail(n) == gamma(n)
    assert limit_of_affine_sequence(tail).horofunction == h


def test_numeric_limit_converges_to_ne2():
    rep = limit_of_numeric_sequence([(k - 2 + 1 / k, k) for k in range(1, 10_001)], tol=1e-3)
    assert rep.outcome == CONVERGES
    h = rep.horofunction
    assert h.support == (1, 2) and h.signs == (-1, -1)
    assert abs(float(h.offsets[0]) - 2) <= 1e-3 and h.offsets[1] == 0


def test_numeric_limit_log_sequence_is_north():
    rep = limit_of_numeric_sequence([(math.log(k), k) for k in range(1, 10_001)], tol=1e-3)
    assert rep.converges
    assert rep.horofunction.support == (2,) and rep.horofunction.signs == (-1,)


def test_numeric_limit_oscillation_is_flagged():
    rep = limit_of_numeric_sequence([((-1) ** k * k, k) for k in range(1, 10_001)], tol=1e-3)
    assert rep.outcome == NOT_CONVERGENT
    w = rep.diagnostics["witness"]
    assert rep.diagnostics["oscillation"] >= 1.5
    # psi at the witness really does swing between even and odd k
    vals = {oracles.psi_at(((-1) ** k * k, k), w) for k in (10_000, 9_999)}
    assert max(vals) - min(vals) >= 1.5


def test_numeric_limit_bounded_and_bad_input():
    assert limit_of_numeric_sequence([(1, 1)] * 20).outcome == BOUNDED
    with pytest.raises(ValueError):
        limit_of_numeric_sequence([(1, 1)] * 3)


def test_numeric_residuals_shrink_on_the_tail():
    rep = limit_of_numeric_sequence([(k - 3 + 5 / k, k) for k in range(1, 10_001)], tol=1e-3)
    res = rep.diagnostics["residuals"]
    assert rep.converges
    assert all(b <= a + 1e-12 for a, b in zip(res, res[1:]))
    assert res[-1] < 3e-3


@settings(max_examples=25)
@given(st.integers(1, 3).flatmap(lambda n: st.tuples(
    st.lists(st.sampled_from((-1, 1)), min_size=n, max_size=n),
    points(n, lo=-4, hi=4, max_den=4))), st.data())
def test_numeric_agrees_with_exact_limit(data, extra):
    signs, b = data
    dim = len(signs)
    # full-speed coordinates are chosen at random; at least one of them
    fast = extra.draw(st.lists(st.booleans(), min_size=dim, max_size=dim).filter(any))
    a = tuple(s if f else F(s, 2) for s, f in zip(signs, fast))
    seq = AffineSequence(a, b)
    exact = limit_of_affine_sequence(seq).horofunction
    pts = [tuple(float(c) for c in seq(k)) for k in range(1, 4001)]
    rep = limit_of_numeric_sequence(pts, tol=1e-2, grid_radius=1.0)
    assert rep.converges
    got = rep.horofunction
    assert got.support == exact.support and got.signs == exact.signs
    assert max(abs(float(x) - float(y)) for x, y in zip(got.offsets, exact.offsets)) <= 1e-2


def test_grid_residual_of_exact_limit_is_small():
    z = np.array([1e6 - 2, 1e6])
    r, _, _ = grid_residual(z, NE(2), np.zeros(2), 1.0, 0.01)
    assert r < 1e-9


def test_param_distance_examples():
    assert horo_param_distance(NE(1), NE(F(3, 2)), 5) == pytest.approx(0.5)
    assert horo_param_distance(NE(3), NE(3), 4) == 0
    assert horo_param_distance(NE(10), Horofunction.compass("N"), 5) == 0


@settings(max_examples=40)
@given(rationals(0, 10), rationals(0, 3), st.floats(0.5, 8))
def test_param_distance_bounded_by_offset_shift(m, delta, radius):
    assert horo_param_distance(NE(m), NE(m + delta), radius) <= float(delta) + 1e-12
