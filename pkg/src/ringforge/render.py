"""Deterministic SVG serialization of a Scene.

Output is plain string assembly with every numeric attribute formatted to
exactly 3 decimal places, so identical scenes produce byte-identical
documents on every platform.  Element order is fixed: background rect,
defs (gyrus label guides), arc group, separator group, chord group, label
group.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from xml.sax.saxutils import escape

from .errors import ValidationError
from .layout import ArcSpan, LabelPlacement, Scene, polar_point
from .style import RGB

SVG_NS = "http://www.w3.org/2000/svg"


@dataclass(frozen=True)
class SvgDocument:
    text: str
    width: float
    height: float


def _fmt(x: float) -> str:
    if not math.isfinite(x):
        raise ValidationError(f"non-finite coordinate {x!r} in scene")
    s = f"{x:.3f}"
    return "0.000" if s == "-0.000" else s


def _fill(color: RGB) -> str:
    return color.css()


def _arc_d(span: ArcSpan) -> str:
    """Annular sector path: outer arc clockwise, inner arc back."""
    large = 1 if (span.end_angle - span.start_angle) > math.pi else 0
    ro, ri = span.outer_radius, span.inner_radius
    x0, y0 = polar_point(span.start_angle, ro)
    x1, y1 = polar_point(span.end_angle, ro)
    x2, y2 = polar_point(span.end_angle, ri)
    x3, y3 = polar_point(span.start_angle, ri)
    return (
        f"M {_fmt(x0)} {_fmt(y0)} "
        f"A {_fmt(ro)} {_fmt(ro)} 0 {large} 1 {_fmt(x1)} {_fmt(y1)} "
        f"L {_fmt(x2)} {_fmt(y2)} "
        f"A {_fmt(ri)} {_fmt(ri)} 0 {large} 0 {_fmt(x3)} {_fmt(y3)} Z"
    )


def _label_guide_d(label: LabelPlacement) -> str:
    """Open arc used as a textPath guide for along-arc labels."""
    assert label.arc_start is not None and label.arc_end is not None
    r = label.radius
    large = 1 if (label.arc_end - label.arc_start) > math.pi else 0
    x0, y0 = polar_point(label.arc_start, r)
    x1, y1 = polar_point(label.arc_end, r)
    return f"M {_fmt(x0)} {_fmt(y0)} A {_fmt(r)} {_fmt(r)} 0 {large} 1 {_fmt(x1)} {_fmt(y1)}"


def _radial_text(label: LabelPlacement) -> str:
    x, y = label.anchor
    deg = math.degrees(label.angle) % 360.0
    if 180.0 < deg <= 360.0:
        rotate = deg + 90.0
        anchor = "end"
    else:
        rotate = deg - 90.0
        anchor = "start"
    return (
        f'<text x="{_fmt(x)}" y="{_fmt(y)}" font-size="{_fmt(label.font_px)}" '
        f'fill="{_fill(label.color)}" text-anchor="{anchor}" dominant-baseline="central" '
        f'transform="rotate({_fmt(rotate)} {_fmt(x)} {_fmt(y)})">{escape(label.text)}</text>'
    )


def render_svg(scene: Scene) -> SvgDocument:
    """Serialize a scene; pure function, byte-stable for equal scenes."""
    w, h = scene.width, scene.height
    lines: list[str] = []
    lines.append('<?xml version="1.0" encoding="UTF-8"?>')
    lines.append(
        f'<svg xmlns="{SVG_NS}" width="{_fmt(w)}" height="{_fmt(h)}" '
        f'viewBox="{_fmt(0.0)} {_fmt(0.0)} {_fmt(w)} {_fmt(h)}">'
    )
    lines.append(
        f'<rect x="0.000" y="0.000" width="{_fmt(w)}" height="{_fmt(h)}" '
        f'fill="{_fill(scene.background)}"/>'
    )

    guides: list[tuple[str, LabelPlacement]] = []
    for k, label in enumerate(lbl for lbl in scene.labels if lbl.orientation == "along-arc"):
        guides.append((f"lg{k}", label))
    lines.append("<defs>")
    for guide_id, label in guides:
        lines.append(f'<path id="{guide_id}" fill="none" d="{_label_guide_d(label)}"/>')
    lines.append("</defs>")

    lines.append('<g id="arcs">')
    for arc in scene.arcs:
        lines.append(
            f'<path d="{_arc_d(arc.span)}" fill="{_fill(arc.fill)}" '
            f'fill-opacity="{_fmt(arc.fill_opacity)}" stroke="{_fill(arc.stroke)}" '
            f'stroke-width="{_fmt(arc.stroke_width)}"/>'
        )
    lines.append("</g>")

    lines.append('<g id="separators">')
    for sep in scene.separators:
        lines.append(
            f'<line x1="{_fmt(sep.x1)}" y1="{_fmt(sep.y1)}" x2="{_fmt(sep.x2)}" '
            f'y2="{_fmt(sep.y2)}" stroke="{_fill(sep.color)}" stroke-width="{_fmt(sep.width)}"/>'
        )
    lines.append("</g>")

    lines.append('<g id="chords">')
    for chord in scene.chords:
        sx, sy = polar_point(*chord.source)
        tx, ty = polar_point(*chord.target)
        cx, cy = chord.control
        lines.append(
            f'<path d="M {_fmt(sx)} {_fmt(sy)} Q {_fmt(cx)} {_fmt(cy)} {_fmt(tx)} {_fmt(ty)}" '
            f'fill="none" stroke="{_fill(chord.color)}" stroke-width="{_fmt(chord.width)}" '
            f'stroke-linecap="round"/>'
        )
    lines.append("</g>")

    lines.append('<g id="labels">')
    guide_ids = iter(guides)
    for label in scene.labels:
        if label.orientation == "along-arc":
            guide_id, _ = next(guide_ids)
            lines.append(
                f'<text font-size="{_fmt(label.font_px)}" fill="{_fill(label.color)}">'
                f'<textPath href="#{guide_id}" startOffset="50%" text-anchor="middle">'
                f"{escape(label.text)}</textPath></text>"
            )
        else:
            lines.append(_radial_text(label))
    lines.append("</g>")

    lines.append("</svg>")
    return SvgDocument(text="\n".join(lines) + "\n", width=w, height=h)
