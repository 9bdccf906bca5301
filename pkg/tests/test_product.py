import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

import oracles
from horostar import HoroballPoint, MulticurveSpec, ProductPoint, h2_distance, pinching_pair, prod_distance
from horostar.product import (
    MINSKY_ASSUMPTION,
    closed_form_gap,
    disjoint_splittings,
    verify_multicurve_star,
)

E2 = math.e**2


def spec(gamma, A, B, **kw):
    return MulticurveSpec(tuple(gamma), frozenset(A), frozenset(B), **kw)


def test_h2_vertical_segment():
    z = HoroballPoint.at_height(E2, eps_thin=0.2)
    w = HoroballPoint.at_height(math.exp(7), eps_thin=0.2)
    assert h2_distance(z, w) == pytest.approx(5.0, abs=1e-12)
    assert oracles.h2_distance_by_integration(z.z, w.z) == pytest.approx(5.0, abs=1e-10)


def test_h2_horizontal_example():
    z = HoroballPoint(0.0, 1 / 5, 0.5)
    w = HoroballPoint(3.0, 1 / 5, 0.5)
    expected = math.acosh(1 + 9 / 50)
    assert h2_distance(z, w) == pytest.approx(expected, abs=1e-14)
    assert oracles.h2_distance_by_integration(z.z, w.z) == pytest.approx(expected, abs=1e-9)


def test_h2_identity():
    z = HoroballPoint(1.5, 0.01)
    assert h2_distance(z, z) == 0


def test_horoball_constraint():
    with pytest.raises(ValueError):
        HoroballPoint(0.0, 0.3, 0.2)
    with pytest.raises(ValueError):
        HoroballPoint(0.0, -1.0)


def test_h2_matches_integration_oracle_on_random_pairs():
    rng = np.random.default_rng(99)
    for _ in range(200):
        z = HoroballPoint(rng.uniform(-20, 20), 1 / rng.uniform(5.5, 500))
        w = HoroballPoint(rng.uniform(-20, 20), 1 / rng.uniform(5.5, 500))
        assert abs(h2_distance(z, w) - oracles.h2_distance_by_integration(z.z, w.z)) < 1e-6


def _random_product(rng, labels):
    return ProductPoint({g: HoroballPoint(rng.uniform(-5, 5), 1 / rng.uniform(6, 200)) for g in labels})


@given(st.integers(0, 10**6))
def test_prod_distance_is_a_metric(seed):
    rng = np.random.default_rng(seed)
    labels = ("a", "b", "c")
    p, q, r = (_random_product(rng, labels) for _ in range(3))
    assert prod_distance(p, p) == 0
    assert prod_distance(p, q) == pytest.approx(prod_distance(q, p), abs=1e-12)
    assert prod_distance(p, r) <= prod_distance(p, q) + prod_distance(q, r) + 1e-9
    assert prod_distance(p, q) > 0


def test_prod_distance_single_factor_change():
    base = {"a": HoroballPoint(0.0, 0.01), "b": HoroballPoint(1.0, 0.1)}
    moved = dict(base, b=HoroballPoint(4.0, 0.1))
    expected = h2_distance(base["b"], moved["b"])
    assert prod_distance(ProductPoint(base), ProductPoint(moved)) == expected


def test_prod_distance_label_mismatch():
    p = ProductPoint({"a": HoroballPoint(0.0, 0.01)})
    q = ProductPoint({"b": HoroballPoint(0.0, 0.01)})
    with pytest.raises(ValueError):
        prod_distance(p, q)


def test_pinching_example_n5():
    s = spec(("alpha", "beta"), {"alpha"}, {"beta"})
    x0, xn, yn = pinching_pair(s, 5)
    assert prod_distance(xn, yn) == pytest.approx(3.0, abs=1e-12)
    assert prod_distance(yn, x0) == pytest.approx(3.0, abs=1e-12)
    assert oracles.h2_distance_by_integration(1j * s.k, 1j * math.exp(5)) == pytest.approx(3.0, abs=1e-9)


def test_degenerate_index_equals_log_k():
    s = spec(("a", "b"), {"a"}, {"b"}, k=math.e, eps_thin=0.5)
    x0, xn, yn = pinching_pair(s, 1)
    assert prod_distance(xn, yn) == pytest.approx(0.0, abs=1e-12)
    assert prod_distance(yn, x0) == pytest.approx(0.0, abs=1e-12)


def test_spec_validation():
    with pytest.raises(ValueError):
        spec(("a", "b"), {"a"}, {"a"})
    with pytest.raises(ValueError):
        spec(("a",), {"a"}, set())
    with pytest.raises(ValueError):
        spec(("a", "b"), {"a"}, {"z"})
    with pytest.raises(ValueError):
        spec(("a", "b"), {"a"}, {"b"}, k=4.0, eps_thin=0.2)


def test_pinching_rejects_points_outside_the_horoball():
    s = spec(("a", "b"), {"a"}, {"b"})
    with pytest.raises(ValueError):
        pinching_pair(s, 1)


@pytest.mark.parametrize("gamma,A,B", [
    (("g1", "g2", "g3", "g4", "g5", "g6"), {"g1", "g2", "g3"}, {"g4", "g5", "g6"}),
    (("g1", "g2", "g3", "g4"), {"g1", "g2"}, {"g3"}),
])
def test_equality_examples(gamma, A, B):
    rep = verify_multicurve_star(spec(gamma, A, B), 30)
    assert rep.passed
    assert rep.max_equality_error == 0.0


def test_curve_case_report():
    rep = verify_multicurve_star(spec(("alpha", "beta"), {"alpha"}, {"beta"}), 30)
    assert rep.passed
    cert = rep.certificate()
    assert cert["C"] == "2c" and cert["C_value"] == 2.0
    d = rep.to_dict()
    assert d["assumptions"] == [MINSKY_ASSUMPTION]
    for n, v in zip(rep.n_values, rep.d_xy):
        assert v == pytest.approx(closed_form_gap(rep.spec, n), abs=1e-9)


def test_monotone_pinching():
    s = spec(("a", "b", "c"), {"a", "c"}, {"b"})
    d = [prod_distance(pinching_pair(s, n)[0], pinching_pair(s, n)[1]) for n in range(2, 31)]
    assert all(b > a for a, b in zip(d, d[1:]))
    assert d[-1] == pytest.approx(30 - 2.0, abs=1e-9)


class _Line:
    def distance(self, p, q):
        return abs(p - q)


def test_base_factor_independence():
    s = spec(("a", "b", "c"), {"a"}, {"b", "c"})
    plain = verify_multicurve_star(s, 20)
    plugged = verify_multicurve_star(s, 20, space=_Line(), base=-2.5)
    assert plain.d_xy == plugged.d_xy and plain.d_y0 == plugged.d_y0


def test_disjoint_splittings_count():
    labels = ["a", "b", "c", "d"]
    got = {(frozenset(A), frozenset(B)) for A, B in disjoint_splittings(labels)}
    want = {(frozenset(A), frozenset(B)) for A, B in oracles.disjoint_pairs(labels)}
    assert got == want
    assert len(got) == 3**4 - 2 * 2**4 + 1


def test_toml_loading():
    text = '[multicurve]\ngamma = ["a", "b", "c"]\nA = ["a"]\nB = ["b", "c"]\nlog_k = 2\nc = 0.5\n'
    s = MulticurveSpec.from_toml(text)
    assert s.k == pytest.approx(E2)
    assert s.c == 0.5 and s.B == frozenset({"b", "c"})
