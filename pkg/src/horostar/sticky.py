"""Finite-scale probes for sticky geodesics.

A geodesic is sticky when segments joining points near its two ends all pass
through one compact set K. The probes here sample such segments in a metric
space and report whether they were all seen to meet a ball K, together with
the separation inequality

    d(y, x) - d(y, x0) > d(x, K) - diam(K)    (x0 in K)

on every sample whose segment meets K. Everything is evidence at finite
scale: verdicts are "consistent", "refuted at scale" or "vacuous".

Two spaces are built in: the upper half-plane and (R^n, sup). The sup-plane
uses directional neighbourhoods of its ends (points far out whose direction
is within O(1/sqrt(R)) of the target), so translated copies of a geodesic
count as having the same ends.
"""
from __future__ import annotations

import itertools
import json
import math
from dataclasses import dataclass, field
from typing import Any, Sequence

import numpy as np

CONSISTENT = "consistent"
REFUTED = "refuted at scale"
VACUOUS = "vacuous"

SEPARATION_TOL = 1e-9


@dataclass(frozen=True)
class Ball:
    center: Any
    radius: float

    def __post_init__(self):
        if self.radius <= 0:
            raise ValueError("radius must be positive")


@dataclass(frozen=True)
class BiGeodesic:
    """A bi-infinite geodesic, known to the probes through its two ends."""

    name: str
    plus: Any
    minus: Any

    def __post_init__(self):
        if _same(self.plus, self.minus):
            raise ValueError("degenerate geodesic: both ends coincide")


def _same(a, b) -> bool:
    if isinstance(a, (tuple, list, np.ndarray)):
        return np.allclose(np.asarray(a, dtype=float), np.asarray(b, dtype=float))
    return a == b


class MetricSpaceHandle:
    """Interface used by the probes. Subclasses must be read-only after init."""

    name = "abstract"

    def distance(self, p, q) -> float:
        raise NotImplementedError

    def geodesics(self, p, q, rng: np.random.Generator, count: int = 1) -> list:
        """Geodesic segments from p to q; the first one is canonical."""
        raise NotImplementedError

    def segment_distance(self, segment, c) -> float:
        raise NotImplementedError

    def boundary_sample(self, target, scale: float, rng: np.random.Generator):
        raise NotImplementedError

    def in_neighborhood(self, p, target, scale: float) -> bool:
        raise NotImplementedError

    def point_json(self, p) -> list:
        return [float(c) for c in p]

    def distance_to_ball(self, p, K: Ball) -> float:
        return max(0.0, self.distance(p, K.center) - K.radius)

    def diameter(self, K: Ball) -> float:
        return 2.0 * K.radius


# ---------------------------------------------------------------------------
# Upper half-plane


def _uhp_distance(z: complex, w: complex) -> float:
    return 2.0 * math.asinh(abs(z - w) / (2.0 * math.sqrt(z.imag * w.imag)))


@dataclass(frozen=True)
class HalfPlaneSegment:
    """Geodesic segment in the upper half-plane, parametrized by arclength u.

    Vertical segments use u = log y; others lie on a circle about a real
    center, with u = log tan(theta/2).
    """

    start: complex
    end: complex
    center: float | None
    radius: float
    u0: float
    u1: float

    @classmethod
    def between(cls, z: complex, w: complex) -> "HalfPlaneSegment":
        scale = max(abs(z), abs(w), 1.0)
        if abs(z.real - w.real) <= 1e-14 * scale:
            return cls(z, w, None, 0.0, math.log(z.imag), math.log(w.imag))
        c = (abs(w) ** 2 - abs(z) ** 2) / (2.0 * (w.real - z.real))
        rho = abs(z - c)
        u = [math.log(math.tan(math.atan2(p.imag, p.real - c) / 2.0)) for p in (z, w)]
        return cls(z, w, c, rho, u[0], u[1])

    def at(self, u: float) -> complex:
        if self.center is None:
            return complex(self.start.real, math.exp(u))
        theta = 2.0 * math.atan(math.exp(u))
        return complex(self.center + self.radius * math.cos(theta), self.radius * math.sin(theta))

    def distance_to(self, p: complex) -> float:
        # distance to a point is convex along a geodesic in H^2
        lo, hi = sorted((self.u0, self.u1))
        f = lambda u: _uhp_distance(self.at(u), p)
        g = (math.sqrt(5) - 1) / 2
        a, b = lo, hi
        c, d = b - g * (b - a), a + g * (b - a)
        fc, fd = f(c), f(d)
        for _ in range(200):
            if b - a < 1e-12:
                break
            if fc < fd:
                b, d, fd = d, c, fc
                c = b - g * (b - a)
                fc = f(c)
            else:
                a, c, fc = c, d, fd
                d = a + g * (b - a)
                fd = f(d)
        return min(f(lo), f(hi), fc, fd)


class HalfPlane(MetricSpaceHandle):
    """Upper half-plane. Boundary targets are real numbers or ``math.inf``."""

    name = "halfplane"

    def distance(self, p, q) -> float:
        return _uhp_distance(complex(p), complex(q))

    def geodesics(self, p, q, rng=None, count: int = 1) -> list:
        return [HalfPlaneSegment.between(complex(p), complex(q))]

    def segment_distance(self, segment: HalfPlaneSegment, c) -> float:
        return segment.distance_to(complex(c))

    def boundary_sample(self, target, scale: float, rng: np.random.Generator) -> complex:
        theta = rng.uniform(1e-3, math.pi - 1e-3)
        if target == math.inf:
            r = scale * rng.uniform(1.0, 2.0)
            return complex(r * math.cos(theta), r * math.sin(theta))
        r = rng.uniform(0.5, 1.0) / scale
        return complex(target + r * math.cos(theta), r * math.sin(theta))

    def in_neighborhood(self, p, target, scale: float) -> bool:
        p = complex(p)
        if target == math.inf:
            return abs(p) >= scale
        return abs(p - target) <= 1.0 / scale

    def point_json(self, p) -> list:
        p = complex(p)
        return [p.real, p.imag]


# ---------------------------------------------------------------------------
# (R^n, sup)


def _segment_sup_distance(a: np.ndarray, b: np.ndarray, c: np.ndarray) -> float:
    """min over t in [0, 1] of |a + t(b - a) - c|_inf, exactly."""
    d = b - a
    e = a - c
    lines = [(s * d[i], s * e[i]) for i in range(len(a)) for s in (1.0, -1.0)]
    cands = {0.0, 1.0}
    for (s1, i1), (s2, i2) in itertools.combinations(lines, 2):
        if s1 != s2:
            t = (i2 - i1) / (s1 - s2)
            if 0.0 < t < 1.0:
                cands.add(t)
    return min(float(np.abs(e + t * d).max()) for t in cands)


@dataclass(frozen=True)
class Polyline:
    vertices: tuple

    def as_array(self) -> np.ndarray:
        return np.array(self.vertices, dtype=float)


class SupSpace(MetricSpaceHandle):
    """R^n with the sup metric; boundary targets are direction vectors.

    ``staircases`` extra geodesics are returned per endpoint pair besides
    the straight segment.
    """

    def __init__(self, dim: int = 2, staircases: int = 6, pieces: int = 8):
        self.dim = dim
        self.staircases = staircases
        self.pieces = pieces
        self.name = "sup" if dim == 2 else f"sup{dim}"

    def distance(self, p, q) -> float:
        return float(np.abs(np.asarray(p, dtype=float) - np.asarray(q, dtype=float)).max())

    def _direction(self, target) -> np.ndarray:
        d = np.asarray(target, dtype=float)
        return d / np.abs(d).max()

    def geodesics(self, p, q, rng: np.random.Generator | None = None, count: int | None = None
                  ) -> list:
        p = np.asarray(p, dtype=float)
        q = np.asarray(q, dtype=float)
        out = [Polyline((tuple(p), tuple(q)))]
        extra = self.staircases if count is None else max(0, count - 1)
        if extra == 0 or rng is None:
            return out
        delta = q - p
        lead = int(np.abs(delta).argmax())
        L = abs(delta[lead])
        if L == 0:
            return out
        cuts = (
            [np.linspace(0, L, self.pieces + 1)]
            + [np.concatenate(([0.0], np.sort(rng.uniform(0, L, self.pieces - 1)), [L]))
               for _ in range(extra)]
        )
        for k in range(extra):
            ts = cuts[k + 1]
            widths = np.diff(ts)
            path = np.zeros((len(ts), self.dim))
            path[0] = p
            for j in range(self.dim):
                if j == lead:
                    path[:, j] = p[j] + np.sign(delta[j]) * ts
                    continue
                # monotone staircase: full speed on a random subset of pieces,
                # partial speed on one, stalled elsewhere
                need = abs(delta[j])
                moves = np.zeros(len(widths))
                for piece in rng.permutation(len(widths)):
                    step = min(widths[piece], need)
                    moves[piece] = step
                    need -= step
                    if need <= 0:
                        break
                path[1:, j] = p[j] + np.sign(delta[j]) * np.cumsum(moves)
            path[-1] = q
            out.append(Polyline(tuple(map(tuple, path))))
        return out

    def segment_distance(self, segment: Polyline, c) -> float:
        v = segment.as_array()
        c = np.asarray(c, dtype=float)
        return min(_segment_sup_distance(v[i], v[i + 1], c) for i in range(len(v) - 1))

    def boundary_sample(self, target, scale: float, rng: np.random.Generator) -> np.ndarray:
        d = self._direction(target)
        spread = math.sqrt(scale)
        return scale * d + rng.uniform(-spread, spread, self.dim)

    def in_neighborhood(self, p, target, scale: float) -> bool:
        p = np.asarray(p, dtype=float)
        r = np.abs(p).max()
        if r < scale / 2:
            return False
        return float(np.abs(p / r - self._direction(target)).max()) <= 4.0 / math.sqrt(scale)


def is_polyline_geodesic(segment: Polyline, tol: float = 1e-9) -> bool:
    v = segment.as_array()
    steps = np.abs(np.diff(v, axis=0)).max(axis=1).sum()
    return abs(steps - np.abs(v[-1] - v[0]).max()) <= tol * max(1.0, steps)


HALFPLANE_AXIS = BiGeodesic("imaginary axis", math.inf, 0.0)
SUP_DIAGONAL = BiGeodesic("diagonal alpha^NE_0", (1.0, 1.0), (-1.0, -1.0))


# ---------------------------------------------------------------------------
# Probes


@dataclass(frozen=True)
class StickyProbeConfig:
    """Candidate K and sampling parameters.

    Sequence pairs are indexed n = 1..horizon at scale
    ``base_scale * (max_scale / base_scale) ** (n / horizon)``; the SG1 check
    looks at n > cut. ``v_scale`` and ``w_scale`` fix the neighbourhoods V
    and W of the two ends.
    """

    center: Any
    radius: float
    v_scale: float = 100.0
    w_scale: float = 100.0
    pairs: int = 50
    horizon: int = 40
    cut: int = 20
    base_scale: float = 10.0
    max_scale: float = 1e6
    sg2_samples: int = 200
    geodesics_per_pair: int = 6

    def __post_init__(self):
        if self.radius <= 0:
            raise ValueError("radius must be positive")
        if min(self.pairs, self.horizon, self.sg2_samples, self.geodesics_per_pair) < 1:
            raise ValueError("counts must be at least 1")
        if not 0 <= self.cut < self.horizon:
            raise ValueError("cut must lie in [0, horizon)")

    @property
    def K(self) -> Ball:
        return Ball(self.center, self.radius)

    def scale(self, n: int) -> float:
        return self.base_scale * (self.max_scale / self.base_scale) ** (n / self.horizon)


@dataclass
class ProbeReport:
    probe: str
    space: str
    gamma: str
    K: dict
    samples: int
    escapes: int
    verdict: str
    min_margin: float | None = None
    vacuous_count: int = 0
    seed: int = 0
    extra: dict = field(default_factory=dict)
    pairs: list = field(default_factory=list, repr=False)

    @property
    def fraction_meeting(self) -> float:
        return 1.0 - self.escapes / self.samples if self.samples else 0.0

    def to_dict(self) -> dict:
        d = {
            "probe": self.probe,
            "space": self.space,
            "gamma": self.gamma,
            "K": self.K,
            "samples": self.samples,
            "escapes": self.escapes,
            "fraction_meeting": self.fraction_meeting,
            "verdict": self.verdict,
            "min_margin": self.min_margin,
            "vacuous_count": self.vacuous_count,
            "seed": self.seed,
        }
        d.update(self.extra)
        return d

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)


def _k_json(space: MetricSpaceHandle, K: Ball) -> dict:
    return {"center": space.point_json(K.center), "radius": K.radius}


def _sequence_pairs(space, gamma, cfg, rng):
    """(pair index, n, x_n, y_n) for n > cut, with x_n -> gamma+ and y_n -> gamma-."""
    for i in range(cfg.pairs):
        for n in range(1, cfg.horizon + 1):
            R = cfg.scale(n)
            x = space.boundary_sample(gamma.plus, R, rng)
            y = space.boundary_sample(gamma.minus, R, rng)
            if n > cfg.cut:
                yield i, n, x, y


def _meets(space, segment, K: Ball) -> bool:
    return space.segment_distance(segment, K.center) <= K.radius


def sg1_probe(space: MetricSpaceHandle, gamma: BiGeodesic, cfg: StickyProbeConfig,
              seed: int = 0) -> ProbeReport:
    """Do the canonical segments x_n y_n all meet K beyond the cut?"""
    rng = np.random.default_rng(seed)
    samples = escapes = 0
    worst = 0.0
    pairs_in_nbhd = []
    for i, n, x, y in _sequence_pairs(space, gamma, cfg, rng):
        seg = space.geodesics(x, y, None, 1)[0]
        dist = space.segment_distance(seg, cfg.center)
        samples += 1
        worst = max(worst, dist)
        if dist > cfg.radius:
            escapes += 1
        if space.in_neighborhood(x, gamma.plus, cfg.v_scale) and \
                space.in_neighborhood(y, gamma.minus, cfg.w_scale):
            pairs_in_nbhd.append((x, y, dist <= cfg.radius))
    return ProbeReport(
        "sg1", space.name, gamma.name, _k_json(space, cfg.K), samples, escapes,
        CONSISTENT if escapes == 0 else REFUTED, seed=seed,
        extra={"max_segment_distance": worst, "pairs_in_neighborhoods": len(pairs_in_nbhd)},
        pairs=pairs_in_nbhd,
    )


def sg2_probe(space: MetricSpaceHandle, gamma: BiGeodesic, cfg: StickyProbeConfig,
              seed: int = 0, pairs: Sequence | None = None) -> ProbeReport:
    """Do all sampled geodesics from W to V meet K?

    Endpoints are drawn from V and W at scales between the neighbourhood
    scale and 10^4 times it; ``pairs`` adds caller-supplied endpoint pairs.
    Every geodesic the space offers for a pair is tested.
    """
    rng = np.random.default_rng(seed)
    endpoints = []
    for _ in range(cfg.sg2_samples):
        rx = cfg.v_scale * 10 ** rng.uniform(0, 4)
        ry = cfg.w_scale * 10 ** rng.uniform(0, 4)
        endpoints.append((space.boundary_sample(gamma.plus, rx, rng),
                          space.boundary_sample(gamma.minus, ry, rng)))
    endpoints.extend(pairs or ())
    samples = escapes = 0
    worst = 0.0
    for x, y in endpoints:
        for seg in space.geodesics(y, x, rng, cfg.geodesics_per_pair):
            dist = space.segment_distance(seg, cfg.center)
            samples += 1
            worst = max(worst, dist)
            if dist > cfg.radius:
                escapes += 1
    return ProbeReport(
        "sg2", space.name, gamma.name, _k_json(space, cfg.K), samples, escapes,
        CONSISTENT if escapes == 0 else REFUTED, seed=seed,
        extra={"max_segment_distance": worst, "endpoint_pairs": len(endpoints)},
    )


def separation_lower_bound(space: MetricSpaceHandle, gamma: BiGeodesic,
                           cfg: StickyProbeConfig, x0, seed: int = 0) -> ProbeReport:
    """Check d(y,x) - d(y,x0) > d(x,K) - diam(K) wherever segment xy meets K.

    ``min_margin`` is the smallest slack (left side minus right side) over
    triggered samples; ``growth`` lists, per index n, the smallest left side
    d(y_n, x_n) - d(y_n, x0) seen among triggered samples.
    """
    K = cfg.K
    if space.distance(x0, K.center) > K.radius:
        raise ValueError("basepoint x0 must lie in K")
    rng = np.random.default_rng(seed)
    diam = space.diameter(K)
    triggered = vacuous = violations = 0
    slack_min = math.inf
    per_n: dict = {}
    for i, n, x, y in _sequence_pairs(space, gamma, cfg, rng):
        seg = space.geodesics(x, y, None, 1)[0]
        if not _meets(space, seg, K):
            vacuous += 1
            continue
        triggered += 1
        lhs = space.distance(y, x) - space.distance(y, x0)
        rhs = space.distance_to_ball(x, K) - diam
        slack = lhs - rhs
        slack_min = min(slack_min, slack)
        if not slack > -SEPARATION_TOL:
            violations += 1
        per_n[n] = min(per_n.get(n, math.inf), lhs)
    if triggered == 0:
        verdict = VACUOUS
    else:
        verdict = CONSISTENT if violations == 0 else REFUTED
    growth = [[n, per_n[n]] for n in sorted(per_n)]
    total = triggered + vacuous
    return ProbeReport(
        "separation", space.name, gamma.name, _k_json(space, K), total, violations, verdict,
        min_margin=None if triggered == 0 else slack_min, vacuous_count=vacuous, seed=seed,
        extra={"triggered": triggered, "violations": violations, "growth": growth,
               "vacuity_flag": vacuous > triggered},
    )
