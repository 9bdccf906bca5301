"""Sup-metric distances, geodesic recognition and directional sequences on R^n.

Points are plain tuples of scalars. Integers and :class:`fractions.Fraction`
values stay exact through every operation here; floats are accepted too and
should be paired with a positive tolerance.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from numbers import Rational
from typing import TYPE_CHECKING, Iterable, Sequence

if TYPE_CHECKING:  # pragma: no cover
    from .horo import Horofunction


class DimensionError(ValueError):
    """Points (or a point and a horofunction) live in different R^n."""


def scalar(x) -> int | Fraction | float:
    """Coerce ``x`` to an exact rational when possible.

    Strings such as ``"3/2"`` or ``"1.3"`` become Fractions, ints and
    Fractions pass through, floats stay floats.
    """
    if isinstance(x, bool):
        raise TypeError("booleans are not coordinates")
    if isinstance(x, (int, Fraction)):
        return x
    if isinstance(x, Rational):
        return Fraction(x)
    if isinstance(x, str):
        return Fraction(x.strip())
    return float(x)


def point(*coords) -> tuple:
    """Build a point; ``point(1, 2)`` and ``point([1, 2])`` both work."""
    if len(coords) == 1 and not isinstance(coords[0], (int, float, Fraction, str)):
        coords = tuple(coords[0])
    if not coords:
        raise ValueError("a point needs at least one coordinate")
    return tuple(scalar(c) for c in coords)


def origin(n: int) -> tuple:
    return (0,) * n


def check_dims(*points: Sequence) -> int:
    n = len(points[0])
    for p in points[1:]:
        if len(p) != n:
            raise DimensionError(f"dimension mismatch: {n} vs {len(p)}")
    return n


def sup_dist(p: Sequence, q: Sequence):
    """max_i |p_i - q_i|."""
    check_dims(p, q)
    return max(abs(a - b) for a, b in zip(p, q))


def sup_norm(p: Sequence):
    return max(abs(a) for a in p)


def add(p: Sequence, q: Sequence) -> tuple:
    check_dims(p, q)
    return tuple(a + b for a, b in zip(p, q))


def sub(p: Sequence, q: Sequence) -> tuple:
    check_dims(p, q)
    return tuple(a - b for a, b in zip(p, q))


def is_geodesic_chain(points: Sequence[Sequence], tol=0) -> bool:
    """Betweenness test for an ordered list of points.

    Every consecutive triple must satisfy d(p,q) + d(q,r) = d(p,r) up to
    ``tol``, and so must the chain as a whole (sum of the steps against the
    distance between the end points).
    """
    if len(points) < 3:
        raise ValueError("a chain needs at least 3 points")
    if tol < 0:
        raise ValueError("tol must be nonnegative")
    check_dims(*points)
    steps = [sup_dist(points[i], points[i + 1]) for i in range(len(points) - 1)]
    for i in range(len(points) - 2):
        gap = steps[i] + steps[i + 1] - sup_dist(points[i], points[i + 2])
        if abs(gap) > tol:
            return False
    return abs(sum(steps) - sup_dist(points[0], points[-1])) <= tol


@dataclass(frozen=True, order=True)
class DirectionalType:
    """A signed coordinate that dominates every step of a sequence.

    ``axis`` is 1-based. In the plane, (2, +1) is northerly, (1, +1)
    easterly, (2, -1) southerly and (1, -1) westerly.
    """

    axis: int
    sign: int

    def __post_init__(self):
        if self.axis < 1:
            raise ValueError("axis is 1-based")
        if self.sign not in (1, -1):
            raise ValueError("sign must be +1 or -1")

    @property
    def compass(self) -> str | None:
        return {(2, 1): "N", (2, -1): "S", (1, 1): "E", (1, -1): "W"}.get(
            (self.axis, self.sign)
        )


def _dominates(steps, axis0: int, sign: int) -> bool:
    for step in steps:
        lead = sign * step[axis0]
        if lead <= 0:
            return False
        if any(abs(c) > lead for c in step):
            return False
    return True


def classify_directional(points: Sequence[Sequence], all_witnesses: bool = False):
    """Find a signed coordinate dominating every step of ``points``.

    A step dominates for (axis i, sign s) when s*(z_{k+1,i} - z_{k,i}) is
    strictly positive and at least |z_{k+1,j} - z_{k,j}| for every j.
    Returns the witness with the smallest axis (sign +1 first), None if there
    is no witness, or the sorted list of all witnesses when
    ``all_witnesses`` is set.
    """
    if len(points) < 2:
        raise ValueError("need at least 2 points")
    n = check_dims(*points)
    steps = [sub(points[k + 1], points[k]) for k in range(len(points) - 1)]
    found = [
        DirectionalType(i + 1, s)
        for i in range(n)
        for s in (1, -1)
        if _dominates(steps, i, s)
    ]
    if all_witnesses:
        return found
    return found[0] if found else None


def _ratio(a, b):
    """a / b, exact when both are rational."""
    if isinstance(a, (int, Fraction)) and isinstance(b, (int, Fraction)):
        return Fraction(a) / b
    return a / b


@dataclass(frozen=True)
class PiecewiseLinearPath:
    """Linear interpolation of a directional sequence.

    The parameter ``t`` is the signed displacement of the dominating
    coordinate from the first vertex, so t runs over [0, length] at unit
    sup-speed.
    """

    vertices: tuple
    direction: DirectionalType

    @property
    def knots(self) -> tuple:
        i, s = self.direction.axis - 1, self.direction.sign
        base = self.vertices[0][i]
        return tuple(s * (v[i] - base) for v in self.vertices)

    @property
    def length(self):
        return self.knots[-1]

    def __call__(self, t):
        knots = self.knots
        if t < 0 or t > knots[-1]:
            raise ValueError(f"t={t} outside [0, {knots[-1]}]")
        for k in range(len(knots) - 1):
            if t <= knots[k + 1]:
                t0, t1 = knots[k], knots[k + 1]
                p, q = self.vertices[k], self.vertices[k + 1]
                lam = _ratio(t - t0, t1 - t0)
                return tuple(a + lam * (b - a) for a, b in zip(p, q))
        return self.vertices[-1]  # pragma: no cover

    def sample(self, ts: Iterable) -> list[tuple]:
        return [self(t) for t in ts]


def interpolate_to_geodesic(points: Sequence[Sequence]) -> PiecewiseLinearPath:
    direction = classify_directional(points)
    if direction is None:
        raise ValueError("sequence is not directional")
    return PiecewiseLinearPath(tuple(point(p) for p in points), direction)


@dataclass(frozen=True)
class NormalFormGeodesic:
    """The unit-speed ray from the origin whose Busemann function is ``target``.

    Coordinate j in the support moves as -eps_j * max(0, t - m_j); the others
    stay at 0. In the plane this is the alpha family, e.g. the target
    max(-x - m, -y) gives t -> (max(0, t - m), t).
    """

    target: "Horofunction"

    def __call__(self, t) -> tuple:
        if t < 0:
            raise ValueError("geodesic rays are parametrized by t >= 0")
        h = self.target
        out = [0] * h.dim
        for j, eps, m in zip(h.support, h.signs, h.offsets):
            out[j - 1] = -eps * max(0, t - m)
        return tuple(out)

    @property
    def breakpoints(self) -> tuple:
        return tuple(sorted(set(self.target.offsets)))

    def sample(self, ts: Iterable) -> list[tuple]:
        return [self(t) for t in ts]


def normal_form_geodesic(h: "Horofunction") -> NormalFormGeodesic:
    if min(h.offsets) != 0:
        raise ValueError("horofunction is not normalized (min offset must be 0)")
    return NormalFormGeodesic(h)
