"""Verification suites, one per statement being checked.

``run_suite`` returns a JSON-ready report. Reports are deterministic given
the seed: no timestamps, no machine-dependent fields, sorted keys.
"""
from __future__ import annotations

import itertools
import json
import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from . import product, sticky
from .horo import (
    AffineSequence,
    Horofunction,
    _fmt,
    busemann_of_geodesic,
    horo_param_distance,
    limit_of_affine_sequence,
    limit_of_numeric_sequence,
)
from .stars import (
    CertificateNotFound,
    FaceClass,
    certificate_search,
    divergence_evidence,
    enumerate_classes,
    minimal_face,
    semicontinuity_check,
    star_distance,
    star_membership,
    star_of,
)
from .sup import normal_form_geodesic

ANCHORS = {
    "thm-d": "Theorem D",
    "thm-e": "Theorem E",
    "rn-orthoplex": "Stars in (R^n, sup): simplicial star of the minimal face",
    "lemma-c-roundtrip": "Lemma C (sequence criterion)",
    "semicontinuity": "Lemma (semicontinuity of stars)",
    "prop-curve-case": "Proposition (the curve case)",
    "thm-multicurve": "Theorem (disjoint multicurves)",
    "sticky-halfplane": "Proposition (SG1/SG2) and Proposition (sticky geodesics separate their ends)",
    "sticky-sup": "Proposition (SG1/SG2) and Proposition (sticky geodesics separate their ends)",
}

DEFAULTS = {
    "thm-d": {"dim": 2, "tol": 1e-3, "horizon": 10_000},
    "thm-e": {"dim": 2, "horizon": 1000},
    "rn-orthoplex": {"dim": 3, "horizon": 100_000, "pairs": 200},
    "lemma-c-roundtrip": {"dim": 2, "horizon": 10**6, "C_max": 1000.0},
    "semicontinuity": {"dim": 2, "pairs": 100, "length": 60, "grid_radius": 4.0},
    "prop-curve-case": {"horizon": 30, "log_k": 2.0, "eps_thin": 0.2, "c": 1.0},
    "thm-multicurve": {"horizon": 30, "log_k": 2.0, "eps_thin": 0.2, "c": 1.0, "max_gamma": 6},
    "sticky-halfplane": {"radius": 1.0, "pairs": 50, "horizon": 40},
    "sticky-sup": {"radii": [1.0, 10.0, 100.0], "pairs": 50, "horizon": 40},
}

SUITES = tuple(ANCHORS)

# planar classes in circle order, by compass letter
CIRCLE = ("E", "NE", "N", "NW", "W", "SW", "S", "SE")
_OPPOSITE = {"N": "S", "S": "N", "E": "W", "W": "E"}
FAMILIES = ("NE", "EN", "NW", "WN", "SE", "ES", "SW", "WS")


class UnknownSuite(ValueError):
    pass


@dataclass
class SuiteSpec:
    suite: str
    seed: int = 0
    params: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.suite not in ANCHORS:
            raise UnknownSuite(f"unknown suite {self.suite!r}; choose from {', '.join(SUITES)}")
        merged = dict(DEFAULTS[self.suite])
        merged.update({k: v for k, v in self.params.items() if v is not None})
        self.params = merged


def _case(name: str, passed: bool, **detail) -> dict:
    return {"case": name, "passed": bool(passed), **detail}


def _rand_offset(rng: np.random.Generator) -> Fraction:
    return Fraction(int(rng.integers(1, 40)), int(rng.integers(1, 8)))


# ---------------------------------------------------------------------------


def _suite_thm_d(p: dict, rng) -> list:
    cases = []
    for name in FAMILIES:
        for m in (Fraction(0), Fraction(1), Fraction(5, 2), Fraction(7)):
            target = Horofunction.compass(name, m)
            gamma = normal_form_geodesic(target)
            start = math.ceil(m) + 1
            a = tuple(q - r for q, r in zip(gamma(start + 1), gamma(start)))
            seq = AffineSequence(a, tuple(q - start * ai for q, ai in zip(gamma(start), a)))
            got = limit_of_affine_sequence(seq).horofunction
            cases.append(_case(f"affine alpha^{name}_{_fmt(m)}", got == target,
                               expected=target.to_dict(), got=got.to_dict()))
    for name in ("N", "S", "E", "W"):
        target = Horofunction.compass(name)
        got = busemann_of_geodesic(normal_form_geodesic(target), 1)
        cases.append(_case(f"axial alpha^{name}", got == target, got=got.to_dict()))

    horizon, tol = int(p["horizon"]), float(p["tol"])
    ks = range(1, horizon + 1)
    rep = limit_of_numeric_sequence([(math.log(k), k) for k in ks], tol=tol)
    ok = rep.converges and rep.horofunction.support == (2,) and rep.horofunction.signs == (-1,)
    cases.append(_case("case 1: (log k, k) -> h^N", ok, outcome=rep.outcome,
                       residual=rep.diagnostics.get("residuals", [None])[-1]))
    for m in (2.0, 2.5):
        rep = limit_of_numeric_sequence([(k - m, k) for k in ks], tol=tol)
        h = rep.horofunction
        ok = (rep.converges and h.support == (1, 2) and h.signs == (-1, -1)
              and abs(float(h.offsets[0]) - m) <= tol and h.offsets[1] == 0)
        cases.append(_case(f"case 2: (k - {m:g}, k) -> h^NE_{m:g}", ok, outcome=rep.outcome,
                           offsets=[float(x) for x in h.offsets] if h else None))

    # the eight classes form a cycle: each edge class has exactly its two
    # neighbouring vertices as faces
    classes = [FaceClass.parse(c) for c in CIRCLE]
    cyc = all(
        classes[i].contains(classes[i - 1]) and classes[i].contains(classes[(i + 1) % 8])
        for i in range(1, 8, 2)
    ) and sum(1 for c in classes if c.face_dim == 0) == 4
    cases.append(_case("boundary is a circle of 4 vertices and 4 arcs", cyc))
    return cases


def _theorem_e_expected(label: str) -> set:
    """Star sets in compass language: hemisphere for axial, quadrant otherwise."""
    if len(label) == 1:
        return {c for c in CIRCLE if _OPPOSITE[label] not in c}
    return {c for c in CIRCLE if set(c) <= set(label)}


def _suite_thm_e(p: dict, rng) -> list:
    cases = []
    for label in CIRCLE:
        got = {c.label for c in star_of(FaceClass.parse(label))}
        exp = _theorem_e_expected(label)
        cases.append(_case(f"star of {label}", got == exp, size=len(got), star=sorted(got)))
    reps = {}
    for label in CIRCLE:
        m = _rand_offset(rng)
        reps[label] = Horofunction.compass(label, m) if len(label) == 2 else Horofunction.compass(label)
    table = [[int(star_membership(reps[a], reps[b])) for b in CIRCLE] for a in CIRCLE]
    symmetric = all(table[i][j] == table[j][i] for i in range(8) for j in range(8))
    cases.append(_case("8x8 membership table symmetric", symmetric, rows=CIRCLE, table=table))
    matches = all(
        bool(table[i][j]) == (b in _theorem_e_expected(a))
        for i, a in enumerate(CIRCLE) for j, b in enumerate(CIRCLE)
    )
    cases.append(_case("table matches the displayed star sets", matches))

    E = Horofunction.compass("E")
    for m in (Fraction(0), Fraction(3), Fraction(7, 2)):
        cert = certificate_search(E, Horofunction.compass("EN", m), horizon=int(p["horizon"]))
        cases.append(_case(f"h^EN_{_fmt(m)} in S(h^E) with C = 0", cert.C == 0,
                           certificate=cert.to_dict()))
    return cases


def _suite_rn_orthoplex(p: dict, rng) -> list:
    dim = int(p["dim"])
    classes = enumerate_classes(dim)
    counts = [sum(1 for c in classes if c.face_dim == k) for k in range(dim)]
    expected = [math.comb(dim, k + 1) * 2 ** (k + 1) for k in range(dim)]
    cases = [_case(f"class count n={dim}", counts == expected and len(classes) == 3**dim - 1,
                   counts=counts, total=len(classes))]
    vertex = FaceClass(dim, (1,), (-1,))
    antipode = FaceClass(dim, (1,), (1,))
    star_size = len(star_of(vertex))
    cases.append(_case("star of a vertex", star_size == 3 ** (dim - 1) * 2 - 1, size=star_size))
    d = star_distance(vertex, antipode)
    cases.append(_case("d*(vertex, antipodal vertex) = 2", d == 2, value=d))

    contradictions, n_member = [], 0
    horizon = int(p["horizon"])
    for i in range(int(p["pairs"])):
        a = classes[int(rng.integers(len(classes)))]
        b = classes[int(rng.integers(len(classes)))]
        xi = a.representative([0] + [_rand_offset(rng) for _ in a.support[1:]])
        eta = b.representative([0] + [_rand_offset(rng) for _ in b.support[1:]])
        member = star_membership(xi, eta)
        n_member += member
        try:
            certificate_search(xi, eta, horizon=200)
            certified = True
        except CertificateNotFound:
            certified = False
        ev = divergence_evidence(xi, eta, C_max=1000.0, horizon=horizon, seed=i, n_random=2)
        if member != certified or member == ev.divergent:
            contradictions.append([a.label, b.label])
    cases.append(_case(f"{p['pairs']} random pairs: rule vs sequence evidence",
                       not contradictions, members=n_member, contradictions=contradictions))
    return cases


def _suite_lemma_c(p: dict, rng) -> list:
    cases = []
    C_max, horizon = float(p["C_max"]), int(p["horizon"])
    for a, b in itertools.product(CIRCLE, repeat=2):
        m = _rand_offset(rng) if len(a) == 2 else Fraction(0)
        l = _rand_offset(rng) if len(b) == 2 else Fraction(0)
        xi = Horofunction.compass(a, m) if len(a) == 2 else Horofunction.compass(a)
        eta = Horofunction.compass(b, l) if len(b) == 2 else Horofunction.compass(b)
        if star_membership(xi, eta):
            try:
                cert = certificate_search(xi, eta, horizon=1000)
                ok = cert.C <= m + l + 1
                cases.append(_case(f"{a}_{_fmt(m)} -> {b}_{_fmt(l)} certified", ok,
                                   C=_fmt(cert.C), bound=_fmt(m + l + 1), family=cert.family))
            except CertificateNotFound:
                cases.append(_case(f"{a}_{_fmt(m)} -> {b}_{_fmt(l)} certified", False))
        else:
            ev = divergence_evidence(xi, eta, C_max=C_max, horizon=horizon)
            cases.append(_case(f"{a}_{_fmt(m)} -> {b}_{_fmt(l)} diverges", ev.divergent,
                               min_margin=ev.min_margin, slope=ev.min_slope))
    return cases


def _random_family(face: FaceClass, rng, length: int):
    """A convergent sequence in ``face``: each offset either settles or blows up."""
    modes = []
    for _ in face.support:
        base = _rand_offset(rng)
        if rng.random() < 0.35:
            modes.append(("diverge", base, Fraction(int(rng.integers(5, 20)))))
        else:
            modes.append(("settle", base, Fraction(int(rng.integers(-3, 4)))))
    seq = []
    for k in range(1, length + 1):
        offs = [b + c * k if kind == "diverge" else b + c / k for kind, b, c in modes]
        offs = [max(Fraction(0), o) for o in offs]
        seq.append(Horofunction.normalize(face.dim, face.support, face.signs, offs))
    return seq, [kind for kind, _, _ in modes]


def _suite_semicontinuity(p: dict, rng) -> list:
    dim, R = int(p["dim"]), float(p["grid_radius"])
    classes = enumerate_classes(dim)
    failures, checked = [], 0
    while checked < int(p["pairs"]):
        a = classes[int(rng.integers(len(classes)))]
        b = classes[int(rng.integers(len(classes)))]
        if not star_membership(a, b):
            continue
        xs, _ = _random_family(a, rng, int(p["length"]))
        ys, _ = _random_family(b, rng, int(p["length"]))
        verdict = semicontinuity_check(xs, ys, grid_radius=R)
        gauge = max(horo_param_distance(xs[-1], verdict.xi_limit, R),
                    horo_param_distance(ys[-1], verdict.eta_limit, R))
        if not verdict.passed or gauge > 1e-2:
            failures.append([a.label, b.label])
        checked += 1
    cases = [_case(f"{checked} random convergent family pairs", not failures,
                   failures=failures)]
    N, E = Horofunction.compass("N"), Horofunction.compass("E")
    v = semicontinuity_check([Horofunction.compass("NE", k) for k in range(1, 41)], [E] * 40, R)
    cases.append(_case("h^NE_k -> h^N with h^E", v.passed and v.xi_limit == N,
                       limit=minimal_face(v.xi_limit).label))
    v = semicontinuity_check([Horofunction.compass("NE", Fraction(1, k)) for k in range(1, 201)],
                             [N] * 200, R)
    cases.append(_case("h^NE_1/k -> h^NE_0 with h^N", v.passed,
                       limit=minimal_face(v.xi_limit).label))
    return cases


def _multicurve_case(spec: product.MulticurveSpec, horizon: int, name: str) -> dict:
    rep = product.verify_multicurve_star(spec, horizon)
    steps = [b - a for a, b in zip(rep.d_y0, rep.d_y0[1:])]
    return _case(name, rep.passed and all(s > 0 for s in steps),
                 max_equality_error=rep.max_equality_error,
                 max_closed_form_error=rep.max_closed_form_error,
                 n_range=[rep.n_values[0], rep.n_values[-1]],
                 C=rep.certificate()["C"])


def _spec(p: dict, gamma, A, B) -> product.MulticurveSpec:
    return product.MulticurveSpec(tuple(gamma), frozenset(A), frozenset(B),
                                  k=math.exp(float(p["log_k"])), eps_thin=float(p["eps_thin"]),
                                  c=float(p["c"]))


class _Line:
    """The real line, used to check that a plugged base space changes nothing."""

    def distance(self, p, q):
        return abs(p - q)

    def __repr__(self):
        return "Line()"


def _suite_curve_case(p: dict, rng) -> list:
    horizon = int(p["horizon"])
    spec = _spec(p, ("alpha", "beta"), {"alpha"}, {"beta"})
    cases = [_multicurve_case(spec, horizon, "curve case: d(x_n', y_n') = d(y_n', x0') = n - log k")]
    rep = product.verify_multicurve_star(spec, horizon)
    cert = rep.certificate()
    cases.append(_case("certificate constant is 2c", cert["C"] == "2c" and cert["C_value"] == 2 * spec.c,
                       certificate=cert, assumptions=[product.MINSKY_ASSUMPTION]))
    plugged = product.verify_multicurve_star(spec, horizon, space=_Line(), base=3.5)
    cases.append(_case("base factor held at sigma changes nothing",
                       plugged.d_xy == rep.d_xy and plugged.d_y0 == rep.d_y0))
    return cases


def _suite_multicurve(p: dict, rng) -> list:
    horizon = int(p["horizon"])
    cases = []
    for size in range(2, int(p["max_gamma"]) + 1):
        gamma = tuple(f"g{i}" for i in range(1, size + 1))
        worst_eq = worst_cf = 0.0
        ok = True
        splits = product.disjoint_splittings(gamma)
        for A, B in splits:
            rep = product.verify_multicurve_star(_spec(p, gamma, A, B), horizon)
            ok &= rep.passed
            worst_eq = max(worst_eq, rep.max_equality_error)
            worst_cf = max(worst_cf, rep.max_closed_form_error)
        cases.append(_case(f"|Gamma| = {size}: all {len(splits)} disjoint splittings", ok,
                           max_equality_error=worst_eq, max_closed_form_error=worst_cf))
    try:
        _spec(p, ("a", "b"), {"a"}, {"a"})
        cases.append(_case("A = B rejected", False))
    except ValueError:
        cases.append(_case("A = B rejected", True))
    return cases


def _probe_cfg(p: dict, center, radius) -> sticky.StickyProbeConfig:
    return sticky.StickyProbeConfig(center=center, radius=radius, pairs=int(p["pairs"]),
                                    horizon=int(p["horizon"]), cut=int(p["horizon"]) // 2)


def _suite_sticky_halfplane(p: dict, rng) -> list:
    space, gamma = sticky.HalfPlane(), sticky.HALFPLANE_AXIS
    cfg = _probe_cfg(p, 1j, float(p["radius"]))
    seed = int(rng.integers(2**31))
    r1 = sticky.sg1_probe(space, gamma, cfg, seed)
    r2 = sticky.sg2_probe(space, gamma, cfg, seed, pairs=[(x, y) for x, y, _ in r1.pairs])
    r3 = sticky.separation_lower_bound(space, gamma, cfg, 1j, seed)
    growth = r3.extra["growth"]
    return [
        _case("SG1 consistent", r1.verdict == sticky.CONSISTENT and r1.samples >= 1000,
              report=r1.to_dict()),
        _case("SG2 consistent", r2.verdict == sticky.CONSISTENT, report=r2.to_dict()),
        _case("separation inequality on every triggered sample",
              r3.verdict == sticky.CONSISTENT and r3.extra["violations"] == 0,
              report=r3.to_dict()),
        _case("margin grows along the horizon", growth[-1][1] > growth[0][1] + 1.0,
              first=growth[0], last=growth[-1]),
    ]


def _suite_sticky_sup(p: dict, rng) -> list:
    space, gamma = sticky.SupSpace(2), sticky.SUP_DIAGONAL
    cases = []
    seed = int(rng.integers(2**31))
    for radius in p["radii"]:
        cfg = _probe_cfg(p, (0.0, 0.0), float(radius))
        r1 = sticky.sg1_probe(space, gamma, cfg, seed)
        r2 = sticky.sg2_probe(space, gamma, cfg, seed)
        r3 = sticky.separation_lower_bound(space, gamma, cfg, (0.0, 0.0), seed)
        cases.append(_case(f"K radius {radius:g}: refuted",
                           r1.verdict == sticky.REFUTED and r2.verdict == sticky.REFUTED,
                           sg1=r1.to_dict(), sg2=r2.to_dict(),
                           separation={k: v for k, v in r3.to_dict().items() if k != "growth"}))
    return cases


_RUNNERS = {
    "thm-d": _suite_thm_d,
    "thm-e": _suite_thm_e,
    "rn-orthoplex": _suite_rn_orthoplex,
    "lemma-c-roundtrip": _suite_lemma_c,
    "semicontinuity": _suite_semicontinuity,
    "prop-curve-case": _suite_curve_case,
    "thm-multicurve": _suite_multicurve,
    "sticky-halfplane": _suite_sticky_halfplane,
    "sticky-sup": _suite_sticky_sup,
}


def run_suite(spec: SuiteSpec) -> dict:
    rng = np.random.default_rng(spec.seed)
    cases = _RUNNERS[spec.suite](spec.params, rng)
    return {
        "suite": spec.suite,
        "anchor": ANCHORS[spec.suite],
        "seed": spec.seed,
        "params": spec.params,
        "passed": all(c["passed"] for c in cases),
        "cases": cases,
    }


def report_json(report: dict) -> str:
    return json.dumps(report, sort_keys=True, indent=2, default=_json_default)


def _json_default(x):
    if isinstance(x, Fraction):
        return _fmt(x)
    if isinstance(x, (np.floating, np.integer)):
        return x.item()
    if isinstance(x, (tuple, frozenset, set)):
        return sorted(x) if isinstance(x, (set, frozenset)) else list(x)
    raise TypeError(f"not JSON serializable: {type(x).__name__}")
