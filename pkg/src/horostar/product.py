"""Sup-products of hyperbolic horoballs with a pluggable base factor.

A curve with Fenchel-Nielsen length l and twist tau sits in the horoball
{y > 1/eps_thin} of the upper half-plane at tau + i/l. A product point
carries one such factor per curve label plus a point of the base space; the
product distance is the max over all factors.
"""
from __future__ import annotations

import itertools
import json
import math
from dataclasses import dataclass, field
from typing import Any, Protocol, Sequence

try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib

DEFAULT_EPS_THIN = 0.2
DEFAULT_K = math.e**2
MINSKY_ASSUMPTION = (
    "Minsky's product-region theorem: the thin part Thin_Gamma is "
    "(1, c)-quasi-isometric to Prod_Gamma; assumed, not verified here"
)


@dataclass(frozen=True)
class HoroballPoint:
    tau: float
    length: float
    eps_thin: float = DEFAULT_EPS_THIN

    def __post_init__(self):
        if self.length <= 0:
            raise ValueError("length must be positive")
        if self.eps_thin <= 0:
            raise ValueError("eps_thin must be positive")
        if not self.length < self.eps_thin:
            raise ValueError(
                f"height 1/length = {1 / self.length:.6g} is not inside the "
                f"horoball y > {1 / self.eps_thin:.6g}"
            )

    @classmethod
    def at_height(cls, height: float, tau: float = 0.0, eps_thin: float = DEFAULT_EPS_THIN):
        return cls(tau, 1.0 / height, eps_thin)

    @property
    def height(self) -> float:
        return 1.0 / self.length

    @property
    def z(self) -> complex:
        return complex(self.tau, self.height)


def h2_distance(z: HoroballPoint, w: HoroballPoint) -> float:
    """Hyperbolic distance in the upper half-plane.

    Uses 2*asinh(|z - w| / (2*sqrt(y_z*y_w))), which equals
    arccosh(1 + |z - w|^2 / (2*y_z*y_w)) without the cancellation near 0.
    """
    if z.eps_thin != w.eps_thin:
        raise ValueError("points come from horoballs of different thinness")
    return _uhp_distance(z.z, w.z)


def _uhp_distance(z: complex, w: complex) -> float:
    return 2.0 * math.asinh(abs(z - w) / (2.0 * math.sqrt(z.imag * w.imag)))


class BaseSpace(Protocol):
    def distance(self, p: Any, q: Any) -> float: ...


class PointSpace:
    """The one-point space; stands in for the fixed lower Teichmueller factor."""

    def distance(self, p, q) -> float:
        return 0.0

    def __repr__(self):
        return "PointSpace()"


@dataclass(frozen=True)
class ProductPoint:
    factors: dict
    base: Any = "sigma"
    space: Any = field(default_factory=PointSpace, compare=False)

    def __post_init__(self):
        thin = {f.eps_thin for f in self.factors.values()}
        if len(thin) > 1:
            raise ValueError("all factors must share eps_thin")

    @property
    def labels(self) -> frozenset:
        return frozenset(self.factors)


def prod_distance(p: ProductPoint, q: ProductPoint) -> float:
    if p.labels != q.labels:
        raise ValueError(f"curve labels differ: {sorted(p.labels ^ q.labels)}")
    d = p.space.distance(p.base, q.base)
    for label, f in p.factors.items():
        d = max(d, h2_distance(f, q.factors[label]))
    return d


@dataclass(frozen=True)
class MulticurveSpec:
    """Curves Gamma, disjoint nonempty A, B in Gamma, rest height k, constant c."""

    gamma: tuple
    A: frozenset
    B: frozenset
    k: float = DEFAULT_K
    eps_thin: float = DEFAULT_EPS_THIN
    c: float = 1.0

    def __post_init__(self):
        object.__setattr__(self, "gamma", tuple(self.gamma))
        object.__setattr__(self, "A", frozenset(self.A))
        object.__setattr__(self, "B", frozenset(self.B))
        if len(set(self.gamma)) != len(self.gamma):
            raise ValueError("curve labels must be distinct")
        if not self.A or not self.B:
            raise ValueError("A and B must be nonempty")
        if self.A & self.B:
            raise ValueError(f"A and B are not disjoint: {sorted(self.A & self.B)}")
        if not (self.A | self.B) <= set(self.gamma):
            raise ValueError("A and B must be subsets of Gamma")
        if self.eps_thin <= 0:
            raise ValueError("eps_thin must be positive")
        if self.k <= 1.0 / self.eps_thin:
            raise ValueError(f"k = {self.k:.6g} must exceed 1/eps_thin = {1 / self.eps_thin:.6g}")

    @property
    def log_k(self) -> float:
        return math.log(self.k)

    def min_index(self) -> int:
        """Smallest n with e^n inside the horoball."""
        return max(1, math.floor(math.log(1.0 / self.eps_thin)) + 1)

    @classmethod
    def from_mapping(cls, d: dict) -> "MulticurveSpec":
        kw = {}
        for key in ("k", "eps_thin", "c"):
            if key in d:
                kw[key] = float(d[key])
        if "log_k" in d:
            kw["k"] = math.exp(float(d["log_k"]))
        return cls(tuple(d["gamma"]), frozenset(d["A"]), frozenset(d["B"]), **kw)

    @classmethod
    def from_toml(cls, text: str, table: str | None = "multicurve") -> "MulticurveSpec":
        data = tomllib.loads(text)
        if table and table in data:
            data = data[table]
        return cls.from_mapping(data)

    def to_dict(self) -> dict:
        return {
            "gamma": list(self.gamma),
            "A": sorted(self.A),
            "B": sorted(self.B),
            "k": self.k,
            "eps_thin": self.eps_thin,
            "c": self.c,
        }


def pinching_pair(spec: MulticurveSpec, n: int, space=None, base="sigma"):
    """Basepoint and the two pinching points at time n.

    x0' sits at height k in every factor; x_n' rises to e^n in the A-factors
    and y_n' in the B-factors. The base coordinate stays at ``base``.
    """
    if n < 1:
        raise ValueError("n must be at least 1")
    height = math.exp(n)
    if height <= 1.0 / spec.eps_thin:
        raise ValueError(f"e^{n} is outside the horoball y > {1 / spec.eps_thin:.6g}")
    space = PointSpace() if space is None else space

    def make(raised):
        return ProductPoint(
            {g: HoroballPoint.at_height(height if g in raised else spec.k, 0.0, spec.eps_thin)
             for g in spec.gamma},
            base, space,
        )

    return make(frozenset()), make(spec.A), make(spec.B)


def closed_form_gap(spec: MulticurveSpec, n: int) -> float:
    """|n - log k|: the common value of d(x_n', y_n') and d(y_n', x0')."""
    return abs(n - spec.log_k)


@dataclass
class MulticurveReport:
    spec: MulticurveSpec
    horizon: int
    n_values: list
    d_xy: list
    d_y0: list
    tol: float = 1e-9
    space: str = "PointSpace()"

    @property
    def max_equality_error(self) -> float:
        return max(abs(a - b) for a, b in zip(self.d_xy, self.d_y0))

    @property
    def max_closed_form_error(self) -> float:
        return max(abs(d - closed_form_gap(self.spec, n)) for n, d in zip(self.n_values, self.d_xy))

    @property
    def passed(self) -> bool:
        return self.max_equality_error <= self.tol and self.max_closed_form_error <= self.tol

    def certificate(self) -> dict:
        """Symbolic Lemma-C data carried over to the thin part."""
        return {
            "xi": "A = {" + ", ".join(sorted(self.spec.A)) + "}",
            "eta": "B = {" + ", ".join(sorted(self.spec.B)) + "}",
            "x_seq": "x_n' = e^n i in A-factors, k i elsewhere",
            "y_seq": "y_n' = e^n i in B-factors, k i elsewhere",
            "inequality": "d(x_n, y_n) <= d(y_n, x_0) + 2c",
            "C": "2c",
            "C_value": 2 * self.spec.c,
            "horizon": self.horizon,
            "min_margin": 0.0 if self.passed else -self.max_equality_error,
        }

    def to_dict(self) -> dict:
        return {
            "spec": self.spec.to_dict(),
            "base_space": self.space,
            "horizon": self.horizon,
            "n_range": [self.n_values[0], self.n_values[-1]],
            "max_equality_error": self.max_equality_error,
            "max_closed_form_error": self.max_closed_form_error,
            "tol": self.tol,
            "passed": self.passed,
            "certificate": self.certificate(),
            "assumptions": [MINSKY_ASSUMPTION],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, indent=2)


def verify_multicurve_star(spec: MulticurveSpec, horizon: int, tol: float = 1e-9,
                           space=None, base="sigma") -> MulticurveReport:
    """Check d(x_n', y_n') = d(y_n', x0') = |n - log k| for every valid n <= horizon."""
    if horizon < 1:
        raise ValueError("horizon must be at least 1")
    start = spec.min_index()
    if horizon < start:
        raise ValueError(f"horizon {horizon} is below the first valid index {start}")
    ns, dxy, dy0 = [], [], []
    for n in range(start, horizon + 1):
        x0, xn, yn = pinching_pair(spec, n, space, base)
        ns.append(n)
        dxy.append(prod_distance(xn, yn))
        dy0.append(prod_distance(yn, x0))
    return MulticurveReport(spec, horizon, ns, dxy, dy0, tol,
                            repr(space) if space is not None else "PointSpace()")


def disjoint_splittings(gamma: Sequence) -> list:
    """All ordered pairs (A, B) of nonempty disjoint subsets of gamma."""
    out = []
    for assignment in itertools.product((0, 1, 2), repeat=len(gamma)):
        A = frozenset(g for g, s in zip(gamma, assignment) if s == 1)
        B = frozenset(g for g, s in zip(gamma, assignment) if s == 2)
        if A and B:
            out.append((A, B))
    return out
