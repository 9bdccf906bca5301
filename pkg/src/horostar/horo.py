"""Horofunctions of (R^n, sup): representation, evaluation and sequence limits.

A horofunction is ``h(z) = max_{j in J} (eps_j * z_j - m_j)`` with a nonempty
support ``J``, signs ``eps_j`` and offsets ``m_j >= 0`` whose minimum is 0.
Coordinates outside ``J`` have an infinite offset and drop out of the max.
Indices are 1-based throughout. The basepoint is the origin.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import numpy as np

from . import kernels
from .sup import (
    DimensionError,
    NormalFormGeodesic,
    check_dims,
    origin,
    scalar,
    sup_dist,
)

# Horofunctions in the plane, by compass name. The first letter is the
# primary direction (offset 0), the second gets the offset m.
_COMPASS = {"E": (1, 1), "W": (1, -1), "N": (2, 1), "S": (2, -1)}


class UnnormalizedError(ValueError):
    """Offsets do not have minimum 0."""


def _fmt(x) -> str:
    if isinstance(x, float):
        return repr(x)
    x = Fraction(x)
    return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


@dataclass(frozen=True)
class Horofunction:
    dim: int
    support: tuple
    signs: tuple
    offsets: tuple

    def __post_init__(self):
        support = tuple(int(j) for j in self.support)
        signs = tuple(int(e) for e in self.signs)
        offsets = tuple(scalar(m) for m in self.offsets)
        object.__setattr__(self, "support", support)
        object.__setattr__(self, "signs", signs)
        object.__setattr__(self, "offsets", offsets)
        if not support:
            raise ValueError("support must be nonempty")
        if not (len(support) == len(signs) == len(offsets)):
            raise ValueError("support, signs and offsets must have equal length")
        if list(support) != sorted(set(support)):
            raise ValueError("support indices must be strictly increasing")
        if support[0] < 1 or support[-1] > self.dim:
            raise ValueError(f"support indices must lie in 1..{self.dim}")
        if any(e not in (1, -1) for e in signs):
            raise ValueError("signs must be +1 or -1")
        if any(m < 0 for m in offsets):
            raise ValueError("offsets must be nonnegative")
        if min(offsets) != 0:
            raise UnnormalizedError(f"min offset is {min(offsets)}, expected 0")

    @classmethod
    def normalize(cls, dim: int, support, signs, offsets) -> "Horofunction":
        """Build a horofunction after subtracting the minimum offset."""
        offsets = [scalar(m) for m in offsets]
        low = min(offsets)
        return cls(dim, tuple(support), tuple(signs), tuple(m - low for m in offsets))

    @classmethod
    def compass(cls, name: str, m=0) -> "Horofunction":
        """Planar horofunctions by name: ``"E"`` is -x, ``("NE", m)`` is
        max(-x - m, -y), ``("EN", m)`` is max(-x, -y - m), and so on."""
        name = name.upper()
        if len(name) == 1:
            axis, direction = _COMPASS[name]
            return cls(2, (axis,), (-direction,), (0,))
        if len(name) != 2 or name[0] not in _COMPASS or name[1] not in _COMPASS:
            raise ValueError(f"unknown compass name {name!r}")
        (a1, d1), (a2, d2) = _COMPASS[name[0]], _COMPASS[name[1]]
        if a1 == a2:
            raise ValueError(f"{name!r} repeats an axis")
        terms = sorted([(a1, -d1, 0), (a2, -d2, scalar(m))])
        return cls(2, *zip(*terms))

    def terms(self):
        return zip(self.support, self.signs, self.offsets)

    def __call__(self, z: Sequence):
        if len(z) != self.dim:
            raise DimensionError(f"point has dimension {len(z)}, horofunction {self.dim}")
        return max(e * z[j - 1] - m for j, e, m in self.terms())

    @property
    def is_axial(self) -> bool:
        return len(self.support) == 1

    def offset(self, j: int):
        """Offset of coordinate j (1-based); ``math.inf`` outside the support."""
        for i, _, m in self.terms():
            if i == j:
                return m
        return math.inf

    def expression(self) -> str:
        names = "xyz" if self.dim <= 3 else None
        parts = []
        for j, e, m in self.terms():
            var = names[j - 1] if names else f"x{j}"
            s = ("" if e > 0 else "-") + var
            if m != 0:
                s += f"-{_fmt(m)}"
            parts.append(s)
        return parts[0] if len(parts) == 1 else "max(" + ", ".join(parts) + ")"

    def to_dict(self) -> dict:
        return {
            "dim": self.dim,
            "support": list(self.support),
            "signs": list(self.signs),
            "offsets": [_fmt(m) for m in self.offsets],
        }

    @classmethod
    def from_dict(cls, d: dict) -> "Horofunction":
        return cls(int(d["dim"]), tuple(d["support"]), tuple(d["signs"]),
                   tuple(Fraction(str(m)) for m in d["offsets"]))

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)

    @classmethod
    def from_json(cls, s: str) -> "Horofunction":
        return cls.from_dict(json.loads(s))

    def term_arrays(self):
        """(index0, sign, const) float arrays for the grid kernels."""
        return (
            np.array([j - 1 for j in self.support], dtype=np.intp),
            np.array(self.signs, dtype=float),
            np.array([-float(m) for m in self.offsets], dtype=float),
        )


def eval_horofunction(h: Horofunction, z: Sequence):
    return h(z)


def psi_gap(z: Sequence, w: Sequence, x0: Sequence | None = None):
    """Value at ``w`` of the embedded function d(z, .) - d(z, x0)."""
    if x0 is None:
        x0 = origin(len(z))
    check_dims(z, w, x0)
    return sup_dist(z, w) - sup_dist(z, x0)


def _psi_term_arrays(z: np.ndarray, x0: np.ndarray):
    n = len(z)
    d0 = float(np.abs(z - x0).max())
    index = np.repeat(np.arange(n, dtype=np.intp), 2)
    sign = np.tile([-1.0, 1.0], n)
    const = np.empty(2 * n)
    const[0::2] = z - d0
    const[1::2] = -z - d0
    return index, sign, const


@dataclass(frozen=True)
class AffineSequence:
    """z_k = direction * k + offset, with exact rational entries."""

    direction: tuple
    offset: tuple

    def __post_init__(self):
        a = tuple(Fraction(scalar(x)) for x in self.direction)
        b = tuple(Fraction(scalar(x)) for x in self.offset)
        object.__setattr__(self, "direction", a)
        object.__setattr__(self, "offset", b)
        check_dims(a, b)
        if all(x == 0 for x in a):
            raise ValueError("direction must be nonzero")

    @property
    def dim(self) -> int:
        return len(self.direction)

    def __call__(self, k) -> tuple:
        return tuple(a * k + b for a, b in zip(self.direction, self.offset))

    def to_dict(self) -> dict:
        return {"a": [_fmt(x) for x in self.direction], "b": [_fmt(x) for x in self.offset]}

    @classmethod
    def from_dict(cls, d: dict) -> "AffineSequence":
        return cls(tuple(Fraction(str(x)) for x in d["a"]),
                   tuple(Fraction(str(x)) for x in d["b"]))


CONVERGES = "converges"
NOT_CONVERGENT = "not_convergent"
BOUNDED = "bounded"


@dataclass(frozen=True)
class LimitReport:
    outcome: str
    horofunction: Horofunction | None = None
    reason: str = ""
    diagnostics: dict = field(default_factory=dict, compare=False)

    def __post_init__(self):
        if self.outcome not in (CONVERGES, NOT_CONVERGENT, BOUNDED):
            raise ValueError(f"unknown outcome {self.outcome!r}")
        if (self.outcome == CONVERGES) != (self.horofunction is not None):
            raise ValueError("a horofunction is carried exactly when the sequence converges")

    @property
    def converges(self) -> bool:
        return self.outcome == CONVERGES


def limit_of_affine_sequence(s: AffineSequence) -> LimitReport:
    """Exact limit of z_k = a*k + b.

    The coordinates of maximal speed A = max|a_i| form the support; with
    s_i = sign(a_i) and B = max_J s_i*b_i the limit has eps_i = -s_i and
    m_i = B - s_i*b_i.
    """
    a, b = s.direction, s.offset
    speed = max(abs(x) for x in a)
    support = tuple(i + 1 for i, x in enumerate(a) if abs(x) == speed)
    dirs = {j: (1 if a[j - 1] > 0 else -1) for j in support}
    lead = max(dirs[j] * b[j - 1] for j in support)
    h = Horofunction(
        s.dim,
        support,
        tuple(-dirs[j] for j in support),
        tuple(lead - dirs[j] * b[j - 1] for j in support),
    )
    return LimitReport(CONVERGES, h, diagnostics={"speed": speed, "lead": lead})


def _grid(radius: float, spacing: float, dim: int, max_points: int):
    """Lattice covering the sup-ball [-radius, radius]^dim.

    The spacing is widened when the requested one would exceed ``max_points``.
    """
    per_axis = int(math.floor(2 * radius / spacing + 1e-9)) + 1
    cap = max(2, int(max_points ** (1.0 / dim)))
    if per_axis > cap:
        per_axis = cap
    step = 2 * radius / (per_axis - 1) if per_axis > 1 else 0.0
    return np.full(dim, -float(radius)), step, (per_axis,) * dim


def grid_residual(z, h: Horofunction, x0, radius: float, spacing: float,
                  max_points: int = 5_000_000):
    """Max over a grid in the radius ball of |psi_gap(z, ., x0) - h|."""
    z = np.asarray(z, dtype=float)
    x0 = np.asarray(x0, dtype=float)
    lo, step, counts = _grid(radius, spacing, len(z), max_points)
    value, arg = kernels.grid_sup_diff(*_psi_term_arrays(z, x0), *h.term_arrays(),
                                      lo, step, counts)
    return value, arg, step


def _oscillation_witness(points: np.ndarray, x0: np.ndarray, radius: float):
    """Grid point where psi_gap varies most across ``points``."""
    dim = points.shape[1]
    per_axis = max(3, min(21, int(200_000 ** (1.0 / dim))))
    axes = [np.linspace(-radius, radius, per_axis)] * dim
    grid = np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1).reshape(-1, dim)
    vals = np.empty((len(points), len(grid)))
    for r, z in enumerate(points):
        vals[r] = np.abs(grid - z).max(axis=1) - np.abs(z - x0).max()
    spread = vals.max(axis=0) - vals.min(axis=0)
    k = int(spread.argmax())
    return grid[k], float(spread[k]), float(vals[:, k].min()), float(vals[:, k].max())


def limit_of_numeric_sequence(points, x0=None, tol: float = 1e-3, grid_radius: float = 1.0,
                              max_grid_points: int = 5_000_000) -> LimitReport:
    """Classify the limit of a finite sample of a sequence.

    Offsets are estimated on the last half of the points: coordinate i gets a
    finite offset r_k - |z_{k,i}| (r_k the sup-norm) when that quantity varies
    by at most ``tol`` over the window and the sign of z_{k,i} is constant
    there. The reconstructed horofunction is accepted only if it matches
    psi_gap(z_last, ., x0) within 3*tol on a grid of spacing ``tol`` in the
    sup-ball of radius ``grid_radius``.
    """
    pts = np.asarray([[float(c) for c in p] for p in points], dtype=float)
    if pts.ndim != 2 or len(pts) < 8:
        raise ValueError("need at least 8 points")
    if tol <= 0:
        raise ValueError("tol must be positive")
    dim = pts.shape[1]
    x0 = np.zeros(dim) if x0 is None else np.asarray([float(c) for c in x0])
    if len(x0) != dim:
        raise DimensionError("basepoint dimension differs from the sequence")

    tail = pts[len(pts) // 2:]
    norms = np.abs(tail).max(axis=1)
    diag = {"window": [len(pts) // 2, len(pts) - 1], "max_norm": float(norms.max())}
    if norms.max() <= 1.0 / tol:
        return LimitReport(BOUNDED, reason="sup-norms stay below 1/tol", diagnostics=diag)

    est = norms[:, None] - np.abs(tail)
    spread = est.max(axis=0) - est.min(axis=0)
    signs = np.sign(tail)
    sign_stable = np.all(signs == signs[-1], axis=0) & (signs[-1] != 0)
    finite = spread <= tol
    diag["offset_estimates"] = [float(e) for e in est[-1]]
    diag["offset_spread"] = [float(s) for s in spread]

    unstable = [i + 1 for i in range(dim) if finite[i] and not sign_stable[i]]
    if unstable or not finite.any():
        w, osc, lo_v, hi_v = _oscillation_witness(tail[-8:], x0, grid_radius)
        diag.update(witness=[float(c) for c in w], oscillation=osc, witness_range=[lo_v, hi_v])
        reason = (f"sign of coordinate(s) {unstable} does not stabilize" if unstable
                  else "no coordinate has a stable offset")
        return LimitReport(NOT_CONVERGENT, reason=reason, diagnostics=diag)

    support = tuple(i + 1 for i in range(dim) if finite[i])
    h = Horofunction.normalize(
        dim,
        support,
        tuple(-int(signs[-1, j - 1]) for j in support),
        tuple(max(0.0, float(est[-1, j - 1])) for j in support),
    )
    checkpoints = sorted({len(tail) // 2, 3 * len(tail) // 4, len(tail) - 1})
    residuals = []
    step = tol
    for c in checkpoints:
        r, arg, step = grid_residual(tail[c], h, x0, grid_radius, tol, max_grid_points)
        residuals.append(r)
    diag.update(residuals=residuals, grid_spacing=step, witness=[float(c) for c in arg])
    if residuals[-1] >= 3 * tol:
        return LimitReport(
            NOT_CONVERGENT,
            reason=f"grid residual {residuals[-1]:.3g} exceeds 3*tol",
            diagnostics=diag,
        )
    return LimitReport(CONVERGES, h, diagnostics=diag)


def busemann_of_geodesic(gamma: NormalFormGeodesic, horizon) -> Horofunction:
    """Limit of a normal-form ray, read off its affine tail past ``horizon``."""
    target = gamma.target
    if horizon <= max(target.offsets):
        raise ValueError("horizon must exceed the last breakpoint of the ray")
    p0, p1 = gamma(horizon), gamma(horizon + 1)
    step = tuple(b - a for a, b in zip(p0, p1))
    tail = AffineSequence(step, p0)
    for k in (2, 3):
        if tail(k) != gamma(horizon + k):
            raise ValueError("ray is not affine past the horizon")  # pragma: no cover
    return limit_of_affine_sequence(tail).horofunction


def horo_param_distance(h1: Horofunction, h2: Horofunction, grid_radius: float,
                        steps: int | None = None, max_points: int = 2_000_000) -> float:
    """Sup of |h1 - h2| over a lattice on the sup-ball of radius ``grid_radius``.

    The lattice has ``steps`` intervals per axis (default: as many as
    ``max_points`` allows, at most 256), corners included.
    """
    if h1.dim != h2.dim:
        raise DimensionError("horofunctions live in different dimensions")
    dim = h1.dim
    if steps is None:
        steps = max(2, min(256, int(max_points ** (1.0 / dim)) - 1))
    spacing = 2 * grid_radius / steps
    lo = np.full(dim, -float(grid_radius))
    value, _ = kernels.grid_sup_diff(*h1.term_arrays(), *h2.term_arrays(),
                                     lo, spacing, (steps + 1,) * dim)
    return float(value)


def affine_tail(h: Horofunction) -> AffineSequence:
    """The normal-form ray of ``h`` restricted to integer times past its breakpoints.

    x_n = gamma(n) for n >= max offset; coordinate j is -eps_j*n + eps_j*m_j.
    """
    a = [0] * h.dim
    b = [0] * h.dim
    for j, e, m in h.terms():
        a[j - 1] = -e
        b[j - 1] = e * m
    return AffineSequence(tuple(a), tuple(b))


__all__ = [
    "AffineSequence",
    "BOUNDED",
    "CONVERGES",
    "Horofunction",
    "LimitReport",
    "NOT_CONVERGENT",
    "UnnormalizedError",
    "affine_tail",
    "busemann_of_geodesic",
    "eval_horofunction",
    "grid_residual",
    "horo_param_distance",
    "limit_of_affine_sequence",
    "limit_of_numeric_sequence",
    "psi_gap",
]
