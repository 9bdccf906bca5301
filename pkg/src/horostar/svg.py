"""SVG pictures of the horofunction boundary of (R^n, sup) for n = 2, 3."""
from __future__ import annotations

import math
from pathlib import Path
from xml.sax.saxutils import escape

from .horo import Horofunction
from .stars import FaceClass, enumerate_classes, minimal_face, star_of

SHADE = "#f4a259"
PLAIN = "#dfe7ef"
INK = "#1d2a36"

# circle positions of the planar vertex classes, by compass letter
_PLANAR_ANGLE = {"E": 0.0, "N": 90.0, "W": 180.0, "S": 270.0}


def _planar_formula(c: FaceClass) -> str:
    """Representative formula, e.g. max(-x - m, -y) for NE."""
    names = ("x", "y")
    parts = []
    for i, (j, e) in enumerate(zip(c.support, c.signs)):
        term = f"{'-' if e < 0 else ''}{names[j - 1]}"
        parts.append(term + (" - m" if i == 0 and len(c.support) == 2 else ""))
    return parts[0] if len(parts) == 1 else "max(" + ", ".join(parts) + ")"


def _target_class(target) -> FaceClass | None:
    if target is None:
        return None
    if isinstance(target, Horofunction):
        return minimal_face(target)
    if isinstance(target, FaceClass):
        return target
    raise TypeError("target must be a Horofunction, a FaceClass or None")


def _svg(width: int, height: int, body: list, title: str) -> str:
    head = (f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
            f'viewBox="0 0 {width} {height}" font-family="sans-serif">')
    return "\n".join([head, f"<title>{escape(title)}</title>",
                      f'<rect width="{width}" height="{height}" fill="white"/>', *body, "</svg>\n"])


def _text(x, y, s, size=13, anchor="middle", weight="normal"):
    return (f'<text x="{x:.1f}" y="{y:.1f}" font-size="{size}" text-anchor="{anchor}" '
            f'font-weight="{weight}" fill="{INK}">{escape(s)}</text>')


def _render_circle(target: FaceClass | None) -> str:
    cx, cy, r = 320, 300, 170
    shaded = set(star_of(target)) if target else set()
    body = []

    def at(deg, rad):
        t = math.radians(deg)
        return cx + rad * math.cos(t), cy - rad * math.sin(t)

    for c in enumerate_classes(2):
        if c.face_dim != 1:
            continue
        a0, a1 = sorted(_PLANAR_ANGLE[FaceClass.parse(l).label] for l in c.label)
        if a1 - a0 > 180:
            a0, a1 = a1, a0 + 360
        x0, y0 = at(a0, r)
        x1, y1 = at(a1, r)
        colour = SHADE if c in shaded else PLAIN
        body.append(f'<path d="M {cx} {cy} L {x0:.1f} {y0:.1f} A {r} {r} 0 0 0 {x1:.1f} {y1:.1f} Z" '
                    f'fill="{colour}" fill-opacity="0.55" stroke="{INK}" stroke-width="1"/>')
        lx, ly = at((a0 + a1) / 2, r + 62)
        body.append(_text(lx, ly, c.label, 15, weight="bold"))
        body.append(_text(lx, ly + 17, _planar_formula(c), 12))
    for label, deg in _PLANAR_ANGLE.items():
        c = FaceClass.parse(label)
        x, y = at(deg, r)
        fill = SHADE if c in shaded else "white"
        body.append(f'<circle cx="{x:.1f}" cy="{y:.1f}" r="7" fill="{fill}" stroke="{INK}" stroke-width="2"/>')
        lx, ly = at(deg, r + 24)
        body.append(_text(lx, ly + 5, f"{label}: {_planar_formula(c)}", 12, weight="bold"))
    caption = ("horofunction boundary of (R^2, sup)" if target is None
               else f"star of {target.label} shaded ({len(shaded)} classes)")
    body.append(_text(cx, 40, caption, 16, weight="bold"))
    body.append(_text(cx, 575, "m > 0 is the free offset of each arc", 12))
    return _svg(640, 600, body, caption)


# Schlegel diagram of the octahedron: face (+e1,+e2,+e3) is the outer
# triangle, the opposite face sits inside, rotated by 180 degrees.
def _octahedron_layout():
    cx, cy = 360.0, 370.0
    pos = {}
    for k, j in enumerate((1, 2, 3)):
        t = math.radians(90 + 120 * k)
        pos[(j, -1)] = (cx + 290 * math.cos(t), cy - 290 * math.sin(t))
        pos[(j, 1)] = (cx - 80 * math.cos(t), cy + 80 * math.sin(t))
    return pos, (cx, cy)


def _render_octahedron(target: FaceClass | None) -> str:
    pos, (cx, cy) = _octahedron_layout()
    shaded = set(star_of(target)) if target else set()
    body = []
    classes = enumerate_classes(3)

    def pts(c):
        return [pos[(j, e)] for j, e in zip(c.support, c.signs)]

    outer = FaceClass(3, (1, 2, 3), (-1, -1, -1))
    for c in classes:
        if c.face_dim != 2 or c == outer:
            continue
        p = pts(c)
        colour = SHADE if c in shaded else PLAIN
        body.append('<polygon points="' + " ".join(f"{x:.1f},{y:.1f}" for x, y in p)
                    + f'" fill="{colour}" fill-opacity="0.55" stroke="none"/>')
    for c in classes:
        if c.face_dim != 1:
            continue
        (x0, y0), (x1, y1) = pts(c)
        hot = c in shaded
        body.append(f'<line x1="{x0:.1f}" y1="{y0:.1f}" x2="{x1:.1f}" y2="{y1:.1f}" '
                    f'stroke="{SHADE if hot else INK}" stroke-width="{4 if hot else 1.5}"/>')
    for c in classes:
        p = pts(c)
        x = sum(q[0] for q in p) / len(p)
        y = sum(q[1] for q in p) / len(p)
        if c.face_dim == 0:
            fill = SHADE if c in shaded else "white"
            body.append(f'<circle cx="{x:.1f}" cy="{y:.1f}" r="7" fill="{fill}" stroke="{INK}" stroke-width="2"/>')
            dx, dy = x - cx, y - cy
            norm = math.hypot(dx, dy) or 1.0
            body.append(_text(x + 22 * dx / norm, y + 22 * dy / norm + 4, c.label, 12, weight="bold"))
        elif c == outer:
            body.append(_text(cx, 725, f"outer region: {c.label}", 12))
        elif c.face_dim == 1 and all(e < 0 for e in c.signs):
            # outer edge: label outside the big triangle
            dx, dy = x - cx, y - cy
            norm = math.hypot(dx, dy)
            body.append(_text(x + 26 * dx / norm, y + 26 * dy / norm + 4, c.label, 10))
        else:
            body.append(_text(x, y + 4, c.label, 9 if c.face_dim == 1 else 10))
    caption = ("horofunction boundary of (R^3, sup): octahedron, 26 classes" if target is None
               else f"star of {target.label} shaded ({len(shaded)} classes)")
    if outer in shaded:
        caption += "; outer region included"
    body.append(_text(cx, 30, caption, 15, weight="bold"))
    body.append(_text(cx, 48, "+ej means coordinate j tends to +infinity (term -x_j)", 11))
    return _svg(720, 740, body, caption)


def render_boundary_svg(dim: int, target=None, out=None) -> str:
    """Draw the boundary for dim 2 or 3, shading the star of ``target`` if given.

    Returns the SVG text and writes it to ``out`` when a path is supplied.
    """
    if dim not in (2, 3):
        raise ValueError(f"only dimensions 2 and 3 can be drawn, got {dim}")
    cls = _target_class(target)
    if cls is not None and cls.dim != dim:
        raise ValueError(f"target lives in dimension {cls.dim}, not {dim}")
    text = _render_circle(cls) if dim == 2 else _render_octahedron(cls)
    if out is not None:
        Path(out).write_text(text)
    return text
