"""Halfspaces, stars on the orthoplex boundary, and the star metric.

Boundary points of (R^n, sup) fall into face classes (support J, signs on J),
one per face of the boundary of the cross-polytope. Two points are
star-related exactly when their signs agree on the common support, so stars
and the star metric are computed on the finite set of classes. The sequence
searches below test that rule against the metric itself: a certificate
exhibits sequences x_n -> xi, y_n -> eta with
d(y_n, x_n) <= d(y_n, x0) + C, and divergence evidence shows the gap
d(y_n, x_n) - d(y_n, x0) outgrowing any constant.
"""
from __future__ import annotations

import csv
import io
import itertools
import json
import math
from collections import deque
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence

import numpy as np

from . import kernels
from .horo import (
    AffineSequence,
    Horofunction,
    _fmt,
    affine_tail,
    horo_param_distance,
    limit_of_affine_sequence,
)
from .sup import DimensionError, check_dims, origin, sup_dist

RULE_NOTE = "orthoplex sign-compatibility rule"


@dataclass(frozen=True)
class HalfspaceSpec:
    """H(W, C) = {z : d(z, W) <= d(z, x0) + C}."""

    witnesses: tuple
    C: float | Fraction | int = 0
    x0: tuple | None = None

    def __post_init__(self):
        W = tuple(tuple(w) for w in self.witnesses)
        if not W:
            raise ValueError("witness set must be nonempty")
        if self.C < 0:
            raise ValueError("C must be nonnegative")
        x0 = origin(len(W[0])) if self.x0 is None else tuple(self.x0)
        check_dims(*W, x0)
        object.__setattr__(self, "witnesses", W)
        object.__setattr__(self, "x0", x0)


def halfspace_contains(hs: HalfspaceSpec, z: Sequence) -> bool:
    check_dims(hs.x0, z)
    return min(sup_dist(z, w) for w in hs.witnesses) <= sup_dist(z, hs.x0) + hs.C


_PLANAR_AXIS = {(1, -1): "E", (1, 1): "W", (2, -1): "N", (2, 1): "S"}


@dataclass(frozen=True, order=True)
class FaceClass:
    """Face of the orthoplex boundary: support J (1-based) and signs on J.

    The face spanned by the vertices -eps_j * e_j for j in J. All
    horofunctions with this support and these signs share it.
    """

    dim: int
    support: tuple
    signs: tuple

    def __post_init__(self):
        support = tuple(int(j) for j in self.support)
        signs = tuple(int(e) for e in self.signs)
        object.__setattr__(self, "support", support)
        object.__setattr__(self, "signs", signs)
        if not support or len(support) != len(signs):
            raise ValueError("support must be nonempty and match signs")
        if list(support) != sorted(set(support)) or support[0] < 1 or support[-1] > self.dim:
            raise ValueError("bad support")
        if any(e not in (1, -1) for e in signs):
            raise ValueError("signs must be +1 or -1")

    @property
    def sign_map(self) -> dict:
        return dict(zip(self.support, self.signs))

    @property
    def face_dim(self) -> int:
        return len(self.support) - 1

    @property
    def label(self) -> str:
        if self.dim == 2:
            letters = {j: _PLANAR_AXIS[(j, e)] for j, e in zip(self.support, self.signs)}
            if len(letters) == 1:
                return next(iter(letters.values()))
            return letters[2] + letters[1]
        return ",".join(f"{'+' if e < 0 else '-'}e{j}" for j, e in zip(self.support, self.signs))

    def representative(self, offsets: Sequence | None = None) -> Horofunction:
        """A horofunction in this class (all offsets 0 unless given)."""
        if offsets is None:
            offsets = (0,) * len(self.support)
        return Horofunction(self.dim, self.support, self.signs, tuple(offsets))

    def contains(self, other: "FaceClass") -> bool:
        """True when ``other`` is a face of this simplex."""
        mine = self.sign_map
        return all(mine.get(j) == e for j, e in zip(other.support, other.signs))

    def to_dict(self) -> dict:
        return {"dim": self.dim, "support": list(self.support), "signs": list(self.signs),
                "label": self.label}

    @classmethod
    def parse(cls, text: str, dim: int = 2) -> "FaceClass":
        """Parse a planar compass label ("E", "NE", "SW") or "+e1,-e3" form."""
        text = text.strip()
        if dim == 2 and text.upper().replace("-EDGE", "") in _PLANAR_LABELS:
            return _PLANAR_LABELS[text.upper().replace("-EDGE", "")]
        pairs = []
        for part in text.split(","):
            part = part.strip()
            if len(part) < 3 or part[0] not in "+-" or part[1] != "e":
                raise ValueError(f"cannot parse face label {text!r}")
            pairs.append((int(part[2:]), -1 if part[0] == "+" else 1))
        pairs.sort()
        return cls(dim, tuple(p[0] for p in pairs), tuple(p[1] for p in pairs))


def enumerate_classes(dim: int) -> list[FaceClass]:
    """All 3^n - 1 faces of the orthoplex boundary, sorted by face dimension."""
    if dim < 1:
        raise ValueError("dimension must be positive")
    out = []
    for size in range(1, dim + 1):
        for support in itertools.combinations(range(1, dim + 1), size):
            for signs in itertools.product((-1, 1), repeat=size):
                out.append(FaceClass(dim, support, signs))
    return out


_PLANAR_LABELS = {c.label: c for c in enumerate_classes(2)}


def minimal_face(h: Horofunction) -> FaceClass:
    return FaceClass(h.dim, h.support, h.signs)


def _as_class(x) -> FaceClass:
    return minimal_face(x) if isinstance(x, Horofunction) else x


def star_membership(xi, eta) -> bool:
    """Signs of xi and eta agree on their common support.

    Accepts horofunctions or face classes. Symmetric for sup metrics.
    """
    a, b = _as_class(xi), _as_class(eta)
    if a.dim != b.dim:
        raise DimensionError("classes live in different dimensions")
    sa = a.sign_map
    return all(sa.get(j, e) == e for j, e in zip(b.support, b.signs))


def star_of(xi) -> frozenset:
    c = _as_class(xi)
    return frozenset(f for f in enumerate_classes(c.dim) if star_membership(c, f))


def class_graph(dim: int) -> dict:
    """Adjacency between distinct star-related classes."""
    classes = enumerate_classes(dim)
    return {
        c: sorted(f for f in classes if f != c and star_membership(c, f))
        for c in classes
    }


def _bfs(graph: dict, source: FaceClass) -> dict:
    dist = {source: 0}
    queue = deque([source])
    while queue:
        u = queue.popleft()
        for v in graph[u]:
            if v not in dist:
                dist[v] = dist[u] + 1
                queue.append(v)
    return dist


_GRAPH_CACHE: dict = {}


def _graph(dim: int) -> dict:
    if dim not in _GRAPH_CACHE:
        _GRAPH_CACHE[dim] = class_graph(dim)
    return _GRAPH_CACHE[dim]


def star_distance(xi, eta) -> int | float:
    """Star distance between boundary points or classes.

    For two classes, 0 means identical classes. For two horofunctions, 0
    means identical points and two distinct points in one class are at
    distance 1. Unreachable pairs (only possible when n = 1) give inf.
    """
    if isinstance(xi, Horofunction) and isinstance(eta, Horofunction):
        if xi == eta:
            return 0
        if minimal_face(xi) == minimal_face(eta):
            return 1
    a, b = _as_class(xi), _as_class(eta)
    if a.dim != b.dim:
        raise DimensionError("classes live in different dimensions")
    return _bfs(_graph(a.dim), a).get(b, math.inf)


def distance_table(dim: int) -> dict:
    graph = _graph(dim)
    return {c: _bfs(graph, c) for c in graph}


def export_class_graph_csv(dim: int) -> str:
    """Edge list (one row per unordered star-related pair of distinct classes)."""
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["source", "target"])
    graph = _graph(dim)
    for c in sorted(graph):
        for f in graph[c]:
            if c < f:
                writer.writerow([c.label, f.label])
    return buf.getvalue()


# ---------------------------------------------------------------------------
# Sequence-level evidence


def _sup_pl_terms(x: AffineSequence, y: AffineSequence, x0: Sequence):
    """Linear forms (alpha, beta) with d(y_n, x_n) = max |alpha n + beta| etc."""
    yx = [(ay - ax, by - bx) for ax, bx, ay, by in
          zip(x.direction, x.offset, y.direction, y.offset)]
    y0 = [(ay, by - Fraction(c)) for ay, by, c in zip(y.direction, y.offset, x0)]
    return yx, y0


def _abs_max(forms, n):
    return max(abs(a * n + b) for a, b in forms)


def _gap(forms_yx, forms_y0, n):
    return _abs_max(forms_yx, n) - _abs_max(forms_y0, n)


def exact_gap_sup(x: AffineSequence, y: AffineSequence, x0: Sequence | None = None,
                  n_min: int = 1):
    """Exact sup over integers n >= n_min of d(y_n, x_n) - d(y_n, x0).

    Both distances are maxima of |alpha n + beta|; past the last crossing of
    all the forms +-(alpha n + beta) the gap is affine in n. Returns
    ``(sup, slope, settle)`` with ``sup = inf`` when the slope is positive;
    ``settle`` is the index after which the gap is affine.
    """
    x0 = origin(x.dim) if x0 is None else x0
    yx, y0 = _sup_pl_terms(x, y, x0)
    lines = []
    for a, b in yx + y0:
        lines += [(a, b), (-a, -b)]
    crossing = Fraction(n_min)
    for (a1, b1), (a2, b2) in itertools.combinations(lines, 2):
        if a1 != a2:
            crossing = max(crossing, (b2 - b1) / (a1 - a2))
    settle = max(n_min, math.ceil(crossing) + 1)
    slope = _gap(yx, y0, settle + 1) - _gap(yx, y0, settle)
    if _gap(yx, y0, settle + 2) - _gap(yx, y0, settle + 1) != slope:
        raise AssertionError("gap not affine past the last crossing")  # pragma: no cover
    if slope > 0:
        return math.inf, slope, settle
    return max(_gap(yx, y0, n) for n in range(n_min, settle + 1)), slope, settle


@dataclass(frozen=True)
class StarCertificate:
    """Sequences x_n -> xi and y_n -> eta with d(y_n, x_n) <= d(y_n, x0) + C.

    The bound is checked exactly for 1 <= n <= horizon and, through the
    affine structure of both sequences, for every n >= 1.
    """

    xi: Horofunction
    eta: Horofunction
    x_seq: AffineSequence
    y_seq: AffineSequence
    C: Fraction
    horizon: int
    min_margin: Fraction
    family: str = ""
    margins: tuple = field(default=(), repr=False, compare=False)

    def to_dict(self) -> dict:
        return {
            "xi": self.xi.to_dict(),
            "eta": self.eta.to_dict(),
            "x_seq": self.x_seq.to_dict(),
            "y_seq": self.y_seq.to_dict(),
            "C": _fmt(self.C),
            "horizon": self.horizon,
            "min_margin": _fmt(self.min_margin),
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)


class CertificateNotFound(RuntimeError):
    """No family within the budget certified membership (inconclusive)."""


def _blend(base: AffineSequence, toward: AffineSequence, lam, scale=1) -> AffineSequence:
    """Scale ``base`` in time and mix ``toward`` into coordinates where base is slow."""
    speed = max(abs(v) for v in base.direction)
    a, b = [], []
    for ab, bb, at, bt in zip(base.direction, base.offset, toward.direction, toward.offset):
        if abs(ab) == speed:
            a.append(scale * ab)
            b.append(bb)
        else:
            a.append(scale * (ab + lam * at))
            b.append(bb + lam * bt)
    return AffineSequence(tuple(a), tuple(b))


_BLENDS = (
    ("tails", 1, 0, 0),
    ("tails, y off-support blend 1/2", 1, 0, Fraction(1, 2)),
    ("tails, x off-support blend 1/2", 1, Fraction(1, 2), 0),
    ("tails, both blends -1/2", 1, Fraction(-1, 2), Fraction(-1, 2)),
    ("double speed", 2, 0, 0),
    ("double speed, blends 3/4", 2, Fraction(3, 4), Fraction(3, 4)),
    ("tails, y blend 3/4", 1, 0, Fraction(3, 4)),
    ("tails, x blend -3/4", 1, Fraction(-3, 4), 0),
)


def candidate_families(xi: Horofunction, eta: Horofunction, budget: int | None = None):
    """Pairs (name, x_seq, y_seq) of affine sequences converging to xi and eta.

    Built from the normal-form rays of both targets; the blends move the
    coordinates outside a target's support part of the way toward the other
    ray, at strictly lower speed, so the limits are unchanged.
    """
    tx, ty = affine_tail(xi), affine_tail(eta)
    out = []
    for name, scale, lam_x, lam_y in _BLENDS[: budget if budget else None]:
        x = _blend(tx, ty, lam_x, scale)
        y = _blend(ty, tx, lam_y, scale)
        out.append((name, x, y))
    return out


def certificate_search(xi: Horofunction, eta: Horofunction, budget: int = 8,
                       horizon: int = 1000) -> StarCertificate:
    """Search sequence families for a certificate that eta is in the star of xi.

    Raises :class:`CertificateNotFound` when no family within ``budget``
    admits a finite constant; that outcome is inconclusive, not a disproof.
    """
    if xi.dim != eta.dim:
        raise DimensionError("horofunctions live in different dimensions")
    x0 = origin(xi.dim)
    best = None
    for name, x, y in candidate_families(xi, eta, budget):
        if limit_of_affine_sequence(x).horofunction != xi:
            raise AssertionError(f"family {name!r}: x_n does not converge to xi")
        if limit_of_affine_sequence(y).horofunction != eta:
            raise AssertionError(f"family {name!r}: y_n does not converge to eta")
        sup_gap, _, _ = exact_gap_sup(x, y, x0)
        if sup_gap == math.inf:
            continue
        C = max(Fraction(0), Fraction(sup_gap))
        if best is None or C < best[0]:
            best = (C, name, x, y)
    if best is None:
        raise CertificateNotFound(
            f"no certificate within {budget} families ({RULE_NOTE} predicts "
            f"{'membership' if star_membership(xi, eta) else 'non-membership'})"
        )
    C, name, x, y = best
    margins = []
    for n in range(1, horizon + 1):
        yn = y(n)
        margins.append(sup_dist(yn, x0) + C - sup_dist(yn, x(n)))
    min_margin = min(margins)
    if min_margin < 0:
        raise AssertionError("certificate margin negative")  # pragma: no cover
    return StarCertificate(xi, eta, x, y, C, horizon, min_margin, name, tuple(margins))


@dataclass(frozen=True)
class DivergenceEvidence:
    xi: Horofunction
    eta: Horofunction
    C_max: float
    horizon: int
    min_margin: float
    min_slope: float
    families: int
    divergent: bool
    per_family: tuple = field(default=(), repr=False)

    @property
    def verdict(self) -> str:
        return "evidence of non-membership" if self.divergent else "no divergence found"

    def to_dict(self) -> dict:
        return {
            "xi": self.xi.to_dict(),
            "eta": self.eta.to_dict(),
            "C_max": self.C_max,
            "horizon": self.horizon,
            "min_margin": self.min_margin,
            "min_slope": self.min_slope,
            "families": self.families,
            "verdict": self.verdict,
        }


def _slab_families(xi: Horofunction, eta: Horofunction, rng: np.random.Generator,
                   n_random: int):
    """Affine x-families toward xi and y-families inside a slab around eta.

    The y-families keep eta's support and signs; their offsets move within
    +-1 of eta's (the width-2 slab), and coordinates outside the support
    drift at lower speed. Each stays in the chosen neighbourhood of eta.
    """
    tx, ty = affine_tail(xi), affine_tail(eta)
    xs = [(name, x) for name, x, _ in candidate_families(xi, eta)]
    ys = [(name, y) for name, _, y in candidate_families(xi, eta)]
    eta_sup = set(eta.support)
    for r in range(n_random):
        a, b = list(ty.direction), list(ty.offset)
        for j in range(1, eta.dim + 1):
            if j in eta_sup:
                e = eta.signs[eta.support.index(j)]
                b[j - 1] += e * Fraction(int(rng.integers(-90, 91)), 100)
            else:
                a[j - 1] = Fraction(int(rng.integers(-90, 91)), 100)
                b[j - 1] = Fraction(int(rng.integers(-500, 501)), 100)
        ys.append((f"slab random {r}", AffineSequence(tuple(a), tuple(b))))
        a, b = list(tx.direction), list(tx.offset)
        for j in range(1, xi.dim + 1):
            if j not in set(xi.support):
                a[j - 1] = Fraction(int(rng.integers(-90, 91)), 100)
                b[j - 1] = Fraction(int(rng.integers(-500, 501)), 100)
        xs.append((f"xi random {r}", AffineSequence(tuple(a), tuple(b))))
    return xs, ys


def _to_float(v: Iterable) -> np.ndarray:
    return np.array([float(c) for c in v])


def divergence_evidence(xi: Horofunction, eta: Horofunction, C_max: float = 1000.0,
                        horizon: int = 10**6, seed: int = 0, n_random: int = 4
                        ) -> DivergenceEvidence:
    """Measure d(y_n, x_n) - d(y_n, x0) at the horizon over sampled families.

    Every pairing of an x-family (toward xi) with a y-family (in the slab
    around eta) is evaluated for n up to ``horizon``. Divergence is reported
    when the smallest gap at the horizon exceeds ``C_max``. The slope is
    the growth of that gap over the second half of the horizon.
    """
    if xi.dim != eta.dim:
        raise DimensionError("horofunctions live in different dimensions")
    rng = np.random.default_rng(seed)
    xs, ys = _slab_families(xi, eta, rng, n_random)
    x0 = np.zeros(xi.dim)
    half = max(1, horizon // 2)
    rows = []
    for xname, x in xs:
        ax, bx = _to_float(x.direction), _to_float(x.offset)
        for yname, y in ys:
            ay, by = _to_float(y.direction), _to_float(y.offset)
            series = kernels.affine_gap_series(ax, bx, ay, by, x0, half, horizon)
            at_horizon = float(series[-1])
            slope = (at_horizon - float(series[0])) / max(1, horizon - half)
            rows.append((xname, yname, at_horizon, slope, float(series.min())))
    min_margin = min(r[2] for r in rows)
    min_slope = min(r[3] for r in rows)
    return DivergenceEvidence(xi, eta, float(C_max), horizon, min_margin, min_slope,
                              len(rows), min_margin > C_max, tuple(rows))


# ---------------------------------------------------------------------------
# Semicontinuity


class NonConvergentError(ValueError):
    """A horofunction sequence does not settle in the parameter gauge."""


def limit_class(seq: Sequence[Horofunction], grid_radius: float, tol: float = 1e-2
                ) -> Horofunction:
    """Limit of a horofunction sequence in the radius-``grid_radius`` gauge.

    Offsets beyond twice the radius are invisible on the ball and are
    treated as gone to infinity. The last two terms must agree within
    ``tol`` and the signs of the surviving coordinates must be constant on
    the second half of the sequence.
    """
    if len(seq) < 2:
        raise NonConvergentError("need at least two terms")
    last = seq[-1]
    gap = horo_param_distance(seq[-2], last, grid_radius)
    if gap > tol:
        raise NonConvergentError(f"last terms differ by {gap:.3g} > tol on the ball")
    keep = [(j, e, m) for j, e, m in last.terms() if m <= 2 * grid_radius]
    for h in seq[len(seq) // 2:]:
        for j, e, _ in keep:
            if j in h.support and h.signs[h.support.index(j)] != e:
                raise NonConvergentError(f"sign of coordinate {j} keeps changing")
    return Horofunction(last.dim, *zip(*keep))


@dataclass(frozen=True)
class SemicontinuityVerdict:
    passed: bool
    xi_limit: Horofunction
    eta_limit: Horofunction
    reason: str = ""


def semicontinuity_check(xi_seq: Sequence[Horofunction], eta_seq: Sequence[Horofunction],
                         grid_radius: float = 4.0, tol: float = 1e-2
                         ) -> SemicontinuityVerdict:
    """Check that star membership along two sequences survives in the limit."""
    if len(xi_seq) != len(eta_seq):
        raise ValueError("sequences must have equal length")
    for k, (a, b) in enumerate(zip(xi_seq, eta_seq)):
        if not star_membership(a, b):
            raise ValueError(f"pair {k} is not star-related")
    xi_lim = limit_class(xi_seq, grid_radius, tol)
    eta_lim = limit_class(eta_seq, grid_radius, tol)
    ok = star_membership(xi_lim, eta_lim)
    return SemicontinuityVerdict(
        ok, xi_lim, eta_lim,
        "" if ok else f"{minimal_face(eta_lim).label} not in star of {minimal_face(xi_lim).label}",
    )
