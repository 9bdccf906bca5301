"""Command-line entry point: ``horostar <subcommand> ...``.

Exit codes: 0 when every check passes, 1 when a check fails, 2 on bad usage
or unreadable input. Settings resolve as command-line flag, then the
``--config`` TOML file, then built-in defaults.
"""
from __future__ import annotations

import argparse
import json
import math
import sys
from fractions import Fraction
from pathlib import Path

try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib

from . import __version__, product, sticky
from .horo import AffineSequence, Horofunction, _fmt, limit_of_affine_sequence, limit_of_numeric_sequence
from .kernels import BACKEND
from .report import FORMATS, export_report
from .stars import (
    FaceClass,
    HalfspaceSpec,
    CertificateNotFound,
    certificate_search,
    divergence_evidence,
    halfspace_contains,
    minimal_face,
    star_distance,
    star_membership,
    star_of,
)
from .suites import SUITES, SuiteSpec, UnknownSuite, _json_default, run_suite
from .svg import render_boundary_svg

OK, FAILED, USAGE = 0, 1, 2

# fallbacks used when neither a flag nor the config file sets a value
DEFAULTS = {"dim": 2, "tol": 1e-3, "seed": 0, "format": "json"}


class UsageError(Exception):
    pass


def _vector(text: str) -> tuple:
    try:
        return tuple(Fraction(part.strip()) for part in text.split(","))
    except (ValueError, ZeroDivisionError) as exc:
        raise UsageError(f"cannot parse vector {text!r}: {exc}") from None


def parse_horofunction(text: str, dim: int) -> Horofunction:
    """Accepts JSON, a planar compass name with optional offset ("NE:5/2"),
    or signed axis terms with offsets ("+e1:0,-e3:2")."""
    text = text.strip()
    try:
        if text.startswith("{"):
            return Horofunction.from_json(text)
        if "e" in text.lower() and text[0] in "+-":
            terms = []
            for part in text.split(","):
                label, _, m = part.partition(":")
                c = FaceClass.parse(label.strip(), dim)
                terms.append((c.support[0], c.signs[0], Fraction(m or 0)))
            return Horofunction.normalize(dim, *zip(*sorted(terms)))
        name, _, m = text.partition(":")
        if dim != 2:
            raise UsageError("compass names describe planar horofunctions; use --dim 2")
        return Horofunction.compass(name, Fraction(m or 0))
    except UsageError:
        raise
    except (ValueError, KeyError, json.JSONDecodeError) as exc:
        raise UsageError(f"cannot parse horofunction {text!r}: {exc}") from None


def _load_config(path) -> dict:
    if path is None:
        return {}
    try:
        return tomllib.loads(Path(path).read_text())
    except OSError as exc:
        raise UsageError(f"cannot read config {path}: {exc}") from None
    except tomllib.TOMLDecodeError as exc:
        raise UsageError(f"invalid TOML in {path}: {exc}") from None


def _resolve(args, config: dict, section: str, key: str, default=None):
    """Flag beats the config's [section] table, which beats the top level and defaults."""
    value = getattr(args, key, None)
    if value is not None:
        return value
    table = config.get(section, {})
    if key in table:
        return table[key]
    if key in config and not isinstance(config[key], dict):
        return config[key]
    return DEFAULTS.get(key, default)


def _emit(payload, args, config, section):
    fmt = _resolve(args, config, section, "format")
    out = _resolve(args, config, section, "out")
    if fmt != "json":
        raise UsageError(f"this subcommand only writes json, not {fmt!r}")
    text = json.dumps(payload, sort_keys=True, indent=2, default=_json_default) + "\n"
    _write(text, out)


def _write(text: str, out):
    if out is None:
        sys.stdout.write(text)
        return
    try:
        Path(out).write_text(text)
    except OSError as exc:
        raise UsageError(f"cannot write {out}: {exc}") from None


# ---------------------------------------------------------------------------


def cmd_limit(args, config) -> int:
    if args.points:
        try:
            raw = json.loads(Path(args.points).read_text())
        except (OSError, json.JSONDecodeError) as exc:
            raise UsageError(f"cannot read points from {args.points}: {exc}") from None
        tol = float(_resolve(args, config, "limit", "tol"))
        radius = float(_resolve(args, config, "limit", "grid_radius", 1.0))
        rep = limit_of_numeric_sequence(raw, tol=tol, grid_radius=radius)
    else:
        if args.direction is None or args.offset is None:
            raise UsageError("give --direction and --offset, or --points FILE")
        try:
            seq = AffineSequence(_vector(args.direction), _vector(args.offset))
        except ValueError as exc:
            raise UsageError(str(exc)) from None
        rep = limit_of_affine_sequence(seq)
    payload = {
        "outcome": rep.outcome,
        "horofunction": rep.horofunction.to_dict() if rep.horofunction else None,
        "expression": rep.horofunction.expression() if rep.horofunction else None,
        "reason": rep.reason,
        "diagnostics": rep.diagnostics,
    }
    _emit(payload, args, config, "limit")
    return OK


def cmd_star(args, config) -> int:
    dim = int(_resolve(args, config, "star", "dim"))
    xi = parse_horofunction(args.horofunction, dim)
    payload = {
        "horofunction": xi.to_dict(),
        "class": minimal_face(xi).label,
        "star": sorted(c.label for c in star_of(xi)),
    }
    status = OK
    if args.member is not None:
        eta = parse_horofunction(args.member, dim)
        member = star_membership(xi, eta)
        payload["member"] = {"horofunction": eta.to_dict(), "in_star": member}
        if member:
            try:
                cert = certificate_search(xi, eta, horizon=int(_resolve(args, config, "star", "horizon", 1000)))
                payload["member"]["certificate"] = cert.to_dict()
            except CertificateNotFound as exc:
                payload["member"]["certificate_error"] = str(exc)
                status = FAILED
        else:
            ev = divergence_evidence(xi, eta, horizon=int(_resolve(args, config, "star", "horizon", 10**6)),
                                     seed=int(_resolve(args, config, "star", "seed")))
            payload["member"]["divergence"] = ev.to_dict()
            status = OK if ev.divergent else FAILED
    _emit(payload, args, config, "star")
    return status


def cmd_star_dist(args, config) -> int:
    dim = int(_resolve(args, config, "star", "dim"))

    def parse(text):
        try:
            return FaceClass.parse(text, dim)
        except ValueError:
            return parse_horofunction(text, dim)

    a, b = parse(args.first), parse(args.second)
    d = star_distance(a, b)
    _emit({"first": args.first, "second": args.second,
           "distance": d if math.isfinite(d) else "inf"}, args, config, "star")
    return OK


def cmd_halfspace(args, config) -> int:
    witnesses = [_vector(w) for w in args.witness]
    x0 = _vector(args.x0) if args.x0 else None
    try:
        hs = HalfspaceSpec(tuple(witnesses), Fraction(args.C), x0)
        results = [{"point": [_fmt(c) for c in _vector(p)],
                    "inside": halfspace_contains(hs, _vector(p))} for p in args.point]
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    _emit({"witnesses": [[_fmt(c) for c in w] for w in witnesses], "C": _fmt(hs.C),
           "x0": [_fmt(c) for c in hs.x0], "results": results}, args, config, "halfspace")
    return OK


def cmd_verify(args, config) -> int:
    table = dict(config.get("verify", {}))
    table.update(config.get(args.suite, {}))
    params = {k: v for k, v in table.items() if k not in ("seed", "out", "format")}
    for key in ("dim", "tol", "horizon"):
        value = getattr(args, key)
        if value is not None:
            params[key] = value
    seed = args.seed if args.seed is not None else int(table.get("seed", DEFAULTS["seed"]))
    fmt = args.format or table.get("format", DEFAULTS["format"])
    out = args.out or table.get("out")
    try:
        report = run_suite(SuiteSpec(args.suite, seed=seed, params=params))
    except UnknownSuite as exc:
        raise UsageError(str(exc)) from None
    except (TypeError, ValueError) as exc:
        raise UsageError(f"invalid parameters for {args.suite}: {exc}") from None
    if fmt not in FORMATS:
        raise UsageError(f"unknown format {fmt!r}")
    try:
        text = export_report([report], fmt)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    _write(text, out)
    for case in report["cases"]:
        print(f"{'PASS' if case['passed'] else 'FAIL'}  {report['suite']}: {case['case']}",
              file=sys.stderr)
    return OK if report["passed"] else FAILED


def cmd_plot(args, config) -> int:
    dim = int(_resolve(args, config, "plot", "dim"))
    out = _resolve(args, config, "plot", "out")
    target = None
    if args.target:
        try:
            target = FaceClass.parse(args.target, dim)
        except ValueError:
            target = parse_horofunction(args.target, dim)
    try:
        text = render_boundary_svg(dim, target)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    _write(text, out)
    return OK


def _parse_radii(value) -> list:
    if isinstance(value, (list, tuple)):
        return [float(v) for v in value]
    try:
        return [float(v) for v in str(value).split(",")]
    except ValueError:
        raise UsageError(f"cannot parse radii {value!r}") from None


def cmd_probe_sticky(args, config) -> int:
    space_name = _resolve(args, config, "sticky", "space", "halfplane")
    if space_name == "halfplane":
        space, gamma, center, x0 = sticky.HalfPlane(), sticky.HALFPLANE_AXIS, 1j, 1j
    elif space_name == "sup":
        space, gamma, center, x0 = sticky.SupSpace(2), sticky.SUP_DIAGONAL, (0.0, 0.0), (0.0, 0.0)
    else:
        raise UsageError(f"unknown space {space_name!r}; choose halfplane or sup")
    radii = _parse_radii(_resolve(args, config, "sticky", "radii", "1"))
    seed = int(_resolve(args, config, "sticky", "seed"))
    horizon = int(_resolve(args, config, "sticky", "horizon", 40))
    pairs = int(_resolve(args, config, "sticky", "pairs", 50))
    if any(r <= 0 for r in radii) or horizon < 2 or pairs < 1:
        raise UsageError("radii must be positive, horizon at least 2 and pairs at least 1")
    sweep = []
    for r in radii:
        cfg = sticky.StickyProbeConfig(center=center, radius=r, pairs=pairs, horizon=horizon,
                                       cut=horizon // 2)
        sweep.append({
            "radius": r,
            "sg1": sticky.sg1_probe(space, gamma, cfg, seed).to_dict(),
            "sg2": sticky.sg2_probe(space, gamma, cfg, seed).to_dict(),
            "separation": sticky.separation_lower_bound(space, gamma, cfg, x0, seed).to_dict(),
        })
    _emit({"space": space.name, "gamma": gamma.name, "seed": seed, "sweep": sweep},
          args, config, "sticky")
    return OK


def cmd_prod_verify(args, config) -> int:
    table = dict(config.get("multicurve", {}))
    for key in ("gamma", "A", "B"):
        value = getattr(args, key)
        if value is not None:
            table[key] = [s.strip() for s in value.split(",") if s.strip()]
    for key in ("k", "log_k", "eps_thin", "c"):
        value = getattr(args, key)
        if value is not None:
            table[key] = value
            if key == "k":
                table.pop("log_k", None)
    if not {"gamma", "A", "B"} <= set(table):
        raise UsageError("multicurve needs gamma, A and B (flags or a [multicurve] TOML table)")
    horizon = int(_resolve(args, config, "multicurve", "horizon", 30))
    try:
        spec = product.MulticurveSpec.from_mapping(table)
        rep = product.verify_multicurve_star(spec, horizon, tol=float(_resolve(args, config, "multicurve", "tol", 1e-9)))
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    _emit(rep.to_dict(), args, config, "multicurve")
    return OK if rep.passed else FAILED


# ---------------------------------------------------------------------------


def _common(p: argparse.ArgumentParser, *flags):
    if "dim" in flags:
        p.add_argument("--dim", type=int, help="ambient dimension n")
    if "tol" in flags:
        p.add_argument("--tol", type=float, help="numeric tolerance")
    if "horizon" in flags:
        p.add_argument("--horizon", type=int, help="sequence horizon")
    if "seed" in flags:
        p.add_argument("--seed", type=int, help="random seed")
    p.add_argument("--config", help="TOML file with defaults for this run")
    p.add_argument("--out", help="write output here instead of stdout")
    p.add_argument("--format", choices=FORMATS, help="output format")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="horostar", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version",
                        version=f"%(prog)s {__version__} (kernels: {BACKEND})")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("limit", help="horofunction limit of a sequence")
    p.add_argument("--direction", help="affine direction a, e.g. 1,1")
    p.add_argument("--offset", help="affine offset b, e.g. 0,-3")
    p.add_argument("--points", help="JSON file with a list of points")
    p.add_argument("--grid-radius", dest="grid_radius", type=float)
    _common(p, "tol")
    p.set_defaults(func=cmd_limit)

    p = sub.add_parser("star", help="star of a horofunction, optionally testing a member")
    p.add_argument("horofunction", help='e.g. E, NE:2, "+e1:0,-e3:1" or JSON')
    p.add_argument("--member", help="second horofunction to test against the star")
    _common(p, "dim", "horizon", "seed")
    p.set_defaults(func=cmd_star)

    p = sub.add_parser("star-dist", help="star distance between two classes or horofunctions")
    p.add_argument("first")
    p.add_argument("second")
    _common(p, "dim")
    p.set_defaults(func=cmd_star_dist)

    p = sub.add_parser("halfspace", help="membership in H(W, C)")
    p.add_argument("--witness", action="append", required=True, help="witness point; repeatable")
    p.add_argument("--C", default="0", help="slack constant (default 0)")
    p.add_argument("--x0", help="basepoint (default origin)")
    p.add_argument("--point", action="append", required=True, help="query point; repeatable")
    _common(p)
    p.set_defaults(func=cmd_halfspace)

    p = sub.add_parser("verify", help="run a verification suite")
    p.add_argument("suite", help="one of: " + ", ".join(SUITES))
    _common(p, "dim", "tol", "horizon", "seed")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("plot", help="SVG of the boundary for n = 2 or 3")
    p.add_argument("--target", help="shade the star of this class or horofunction")
    _common(p, "dim")
    p.set_defaults(func=cmd_plot)

    p = sub.add_parser("probe-sticky", help="sticky-geodesic probes with a K-radius sweep")
    p.add_argument("--space", choices=("halfplane", "sup"))
    p.add_argument("--radii", help="comma-separated K radii, e.g. 1,10,100")
    p.add_argument("--pairs", type=int)
    _common(p, "horizon", "seed")
    p.set_defaults(func=cmd_probe_sticky)

    p = sub.add_parser("prod-verify", help="pinching identity in the product-region model")
    p.add_argument("--gamma", help="comma-separated curve labels")
    p.add_argument("--A", help="curves pinched by x_n'")
    p.add_argument("--B", help="curves pinched by y_n'")
    p.add_argument("--k", type=float, help="rest height")
    p.add_argument("--log-k", dest="log_k", type=float, help="log of the rest height")
    p.add_argument("--eps-thin", dest="eps_thin", type=float)
    p.add_argument("--c", type=float, help="additive quasi-isometry constant")
    _common(p, "tol", "horizon")
    p.set_defaults(func=cmd_prod_verify)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        config = _load_config(args.config)
        return args.func(args, config)
    except UsageError as exc:
        print(f"horostar: error: {exc}", file=sys.stderr)
        return USAGE


if __name__ == "__main__":
    sys.exit(main())
