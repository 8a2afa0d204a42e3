"""PNG export: rasterizes the SVG subset emitted by render_svg.

The rasterizer sits behind export_png so callers never depend on the
backend.  The built-in backend parses the document with the stdlib XML
parser and draws with Pillow: annular-sector paths and rects are filled,
quadratic chords and separator lines are stroked, text is approximated with
Pillow's bundled font (the SVG output is the vector-faithful artifact).
Output is fully opaque RGB at an integer multiple of the viewport size.
"""

from __future__ import annotations

import io
import math
import re
import xml.etree.ElementTree as ET

from PIL import Image, ImageDraw, ImageFont

from .errors import RasterizationError, ValidationError
from .render import SvgDocument

_NUM_RE = re.compile(r"[-+]?[0-9]*\.?[0-9]+(?:[eE][-+]?[0-9]+)?")
_ROTATE_RE = re.compile(r"rotate\(([^)]+)\)")


def _local(tag: str) -> str:
    return tag.rpartition("}")[2]


def _color(value: str | None) -> tuple[int, int, int] | None:
    if value is None or value == "none":
        return None
    if not value.startswith("#") or len(value) != 7:
        raise RasterizationError(f"unsupported color {value!r}")
    return int(value[1:3], 16), int(value[3:5], 16), int(value[5:7], 16)


def _blend(fg: tuple[int, int, int], bg: tuple[int, int, int], alpha: float) -> tuple[int, ...]:
    return tuple(round(f * alpha + b * (1.0 - alpha)) for f, b in zip(fg, bg))


def _arc_points(x0: float, y0: float, x1: float, y1: float, r: float,
                large: int, sweep: int, scale: float) -> list[tuple[float, float]]:
    """Flatten one circular SVG arc (rx == ry, no rotation) to a polyline."""
    dx, dy = (x0 - x1) / 2.0, (y0 - y1) / 2.0
    d2 = dx * dx + dy * dy
    if d2 == 0.0:
        return [(x1, y1)]
    radius = max(r, math.sqrt(d2))  # guard float noise on near-degenerate arcs
    disc = radius * radius / d2 - 1.0
    coef = math.sqrt(max(disc, 0.0))
    if large == sweep:
        coef = -coef
    cx = (x0 + x1) / 2.0 + coef * -dy
    cy = (y0 + y1) / 2.0 + coef * dx
    a0 = math.atan2(y0 - cy, x0 - cx)
    a1 = math.atan2(y1 - cy, x1 - cx)
    delta = a1 - a0
    if sweep and delta < 0:
        delta += 2.0 * math.pi
    elif not sweep and delta > 0:
        delta -= 2.0 * math.pi
    steps = max(2, int(abs(delta) * radius * scale / 4.0))
    return [
        (cx + radius * math.cos(a0 + delta * k / steps),
         cy + radius * math.sin(a0 + delta * k / steps))
        for k in range(1, steps + 1)
    ]


def _quad_points(x0: float, y0: float, cx: float, cy: float,
                 x1: float, y1: float, segments: int = 48) -> list[tuple[float, float]]:
    pts = []
    for k in range(1, segments + 1):
        t = k / segments
        u = 1.0 - t
        pts.append((u * u * x0 + 2 * u * t * cx + t * t * x1,
                    u * u * y0 + 2 * u * t * cy + t * t * y1))
    return pts


def _flatten_path(d: str, scale: float) -> list[tuple[float, float]]:
    """Polyline for the M/A/L/Q/Z subset produced by the renderer."""
    tokens = re.findall(r"[MALQZ]|" + _NUM_RE.pattern, d)
    pts: list[tuple[float, float]] = []
    pos = 0

    def take(k: int) -> list[float]:
        nonlocal pos
        vals = [float(t) for t in tokens[pos : pos + k]]
        pos += k
        return vals

    while pos < len(tokens):
        cmd = tokens[pos]
        pos += 1
        if cmd in ("M", "L"):
            x, y = take(2)
            pts.append((x, y))
        elif cmd == "A":
            rx, _ry, _rot, large, sweep, x, y = take(7)
            x0, y0 = pts[-1]
            pts.extend(_arc_points(x0, y0, x, y, rx, int(large), int(sweep), scale))
        elif cmd == "Q":
            cx, cy, x, y = take(4)
            x0, y0 = pts[-1]
            pts.extend(_quad_points(x0, y0, cx, cy, x, y))
        elif cmd == "Z":
            if pts:
                pts.append(pts[0])
        else:
            raise RasterizationError(f"unsupported path command {cmd!r}")
    return pts


class PillowRasterizer:
    """Default rasterization backend for the renderer's SVG subset."""

    def render(self, svg: SvgDocument, scale: int) -> Image.Image:
        try:
            root = ET.fromstring(svg.text)
        except ET.ParseError as exc:
            raise RasterizationError(f"SVG does not parse: {exc}") from exc
        width = round(svg.width * scale)
        height = round(svg.height * scale)
        image = Image.new("RGB", (width, height), (0, 0, 0))
        draw = ImageDraw.Draw(image)
        guides = {
            el.get("id"): el.get("d", "")
            for el in root.iter()
            if _local(el.tag) == "path" and el.get("id")
        }
        ctx = _Context(image=image, draw=draw, scale=scale, guides=guides)
        for element in root:
            self._draw_element(element, ctx)
        return image

    def _draw_element(self, el, ctx: "_Context") -> None:
        tag = _local(el.tag)
        if tag == "defs":
            return
        if tag == "g":
            for child in el:
                self._draw_element(child, ctx)
        elif tag == "rect":
            self._draw_rect(el, ctx)
        elif tag == "line":
            self._draw_line(el, ctx)
        elif tag == "path":
            self._draw_path(el, ctx)
        elif tag == "text":
            self._draw_text(el, ctx)

    def _draw_rect(self, el, ctx: "_Context") -> None:
        fill = _color(el.get("fill"))
        if fill is None:
            return
        s = ctx.scale
        x, y = float(el.get("x", "0")), float(el.get("y", "0"))
        w, h = float(el.get("width")), float(el.get("height"))
        ctx.draw.rectangle(
            [round(x * s), round(y * s), round((x + w) * s) - 1, round((y + h) * s) - 1],
            fill=fill,
        )
        if x == 0 and y == 0:
            ctx.background = fill

    def _draw_line(self, el, ctx: "_Context") -> None:
        stroke = _color(el.get("stroke"))
        if stroke is None:
            return
        s = ctx.scale
        width = max(1, round(float(el.get("stroke-width", "1")) * s))
        ctx.draw.line(
            [(float(el.get("x1")) * s, float(el.get("y1")) * s),
             (float(el.get("x2")) * s, float(el.get("y2")) * s)],
            fill=stroke,
            width=width,
        )

    def _draw_path(self, el, ctx: "_Context") -> None:
        pts = _flatten_path(el.get("d", ""), ctx.scale)
        if len(pts) < 2:
            return
        s = ctx.scale
        scaled = [(x * s, y * s) for x, y in pts]
        fill = _color(el.get("fill"))
        stroke = _color(el.get("stroke"))
        if fill is not None:
            opacity = float(el.get("fill-opacity", "1"))
            effective = fill if opacity >= 1.0 else _blend(fill, ctx.background, opacity)
            ctx.draw.polygon(scaled, fill=effective)
            if stroke is not None:
                width = max(1, round(float(el.get("stroke-width", "1")) * s))
                ctx.draw.line(scaled + [scaled[0]], fill=stroke, width=width)
        elif stroke is not None:
            width = max(1, round(float(el.get("stroke-width", "1")) * s))
            ctx.draw.line(scaled, fill=stroke, width=width, joint="curve")

    def _font(self, size_px: float, scale: int):
        size = max(6, round(size_px * scale))
        try:
            return ImageFont.load_default(size=size)
        except TypeError:  # old Pillow: fixed-size bitmap font only
            return ImageFont.load_default()

    def _draw_text(self, el, ctx: "_Context") -> None:
        fill = _color(el.get("fill")) or (0, 0, 0)
        font = self._font(float(el.get("font-size", "12")), ctx.scale)
        children = [c for c in el if _local(c.tag) == "textPath"]
        if children:
            self._draw_text_on_path(children[0], font, fill, ctx)
            return
        text = el.text or ""
        if not text:
            return
        x = float(el.get("x", "0")) * ctx.scale
        y = float(el.get("y", "0")) * ctx.scale
        anchor = {"start": "lm", "end": "rm", "middle": "mm"}.get(el.get("text-anchor", "start"), "lm")
        m = _ROTATE_RE.search(el.get("transform", ""))
        if m:
            angle = float(_NUM_RE.findall(m.group(1))[0])
            self._paste_rotated_text(text, (x, y), angle, font, fill, anchor, ctx)
        else:
            ctx.draw.text((x, y), text, font=font, fill=fill, anchor=anchor)

    def _draw_text_on_path(self, text_path_el, font, fill, ctx: "_Context") -> None:
        """Approximation: the label is drawn horizontally, centered on the
        midpoint of its guide arc."""
        text = text_path_el.text or ""
        href = (text_path_el.get("href") or "").lstrip("#")
        guide_d = ctx.guides.get(href)
        if not text or guide_d is None:
            return
        pts = _flatten_path(guide_d, ctx.scale)
        if not pts:
            return
        mx, my = pts[len(pts) // 2]
        ctx.draw.text((mx * ctx.scale, my * ctx.scale), text, font=font, fill=fill, anchor="mm")

    def _paste_rotated_text(self, text, xy, angle_deg, font, fill, anchor, ctx: "_Context") -> None:
        bbox = ctx.draw.textbbox((0, 0), text, font=font)
        tw, th = bbox[2] - bbox[0], bbox[3] - bbox[1]
        if tw <= 0 or th <= 0:
            return
        pad = 4
        tile = Image.new("RGBA", (tw + 2 * pad, th + 2 * pad), (0, 0, 0, 0))
        ImageDraw.Draw(tile).text((pad - bbox[0], pad - bbox[1]), text, font=font, fill=fill + (255,))
        rotated = tile.rotate(-angle_deg, expand=True, resample=Image.BICUBIC)
        # keep the reference point (tile left/right/center edge midpoint) pinned at xy
        if anchor == "lm":
            ref = (pad, tile.height / 2.0)
        elif anchor == "rm":
            ref = (tile.width - pad, tile.height / 2.0)
        else:
            ref = (tile.width / 2.0, tile.height / 2.0)
        theta = math.radians(angle_deg)
        cx, cy = tile.width / 2.0, tile.height / 2.0
        dx, dy = ref[0] - cx, ref[1] - cy
        rx = dx * math.cos(theta) - dy * math.sin(theta)
        ry = dx * math.sin(theta) + dy * math.cos(theta)
        px = round(xy[0] - (rotated.width / 2.0 + rx))
        py = round(xy[1] - (rotated.height / 2.0 + ry))
        ctx.image.paste(rotated, (px, py), rotated)


class _Context:
    def __init__(self, image, draw, scale: int, guides: dict):
        self.image = image
        self.draw = draw
        self.scale = scale
        self.guides = guides
        self.background: tuple[int, int, int] = (0, 0, 0)


_default_rasterizer = PillowRasterizer()


def export_png(svg: SvgDocument, scale: int = 4, rasterizer=None) -> bytes:
    """Rasterize at an integer scale factor; pixel dims = scale x viewport."""
    if not isinstance(scale, int) or scale < 1:
        raise ValidationError(f"scale must be a positive integer, got {scale!r}")
    backend = rasterizer if rasterizer is not None else _default_rasterizer
    try:
        image = backend.render(svg, scale)
    except RasterizationError:
        raise
    except Exception as exc:  # backend failure surfaces with its cause
        raise RasterizationError(f"rasterization failed: {exc}") from exc
    buf = io.BytesIO()
    image.save(buf, format="PNG")
    return buf.getvalue()
