"""Circular layout: region arcs, separators, chord curves, label anchors,
and the fully resolved Scene consumed by the renderer.

Geometry lives in a fixed 1000x1000 viewport.  Angles are radians measured
clockwise from 12 o'clock; a point at (angle a, radius r) maps to
(cx + r*sin(a), cy - r*cos(a)).  Every region receives the same angular
width; separator gaps appear only at top-level group boundaries.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from typing import Sequence

from .atlas import Atlas
from .errors import InfeasibleLayoutError, ValidationError
from .state import ConnectomeState, visible_edges
from .style import (
    RGB,
    PaletteSet,
    StyleConfig,
    arc_colors,
    canvas_background,
    resolve_edge_color,
    theme_foreground,
)

logger = logging.getLogger(__name__)

VIEWPORT = 1000.0
CENTER = VIEWPORT / 2.0
BASE_OUTER_RADIUS = 450.0
#: separator gap at 100% size
BASE_GAP_DEG = 2.0

SEPARATOR_MODES = ("none", "lines", "gaps")

#: label band offsets (viewport units) and font scales per level
RADIAL_LABEL_OFFSET = 6.0
RADIAL_BAND_STEP = 14.0
LOBE_LABEL_OFFSET = 34.0
LOBE_FONT_SCALE = 1.25
SUBREGION_FONT_SCALE = 0.65
INDEX_FONT_SCALE = 0.6
SEPARATOR_OVERHANG = 6.0
#: arc fill opacity for regions outside a non-empty selection
UNSELECTED_ARC_OPACITY = 0.45

LABEL_LEVELS = ("lobe", "gyrus", "subregion", "index")


def _clamped(name: str, value: float, lo: float, hi: float) -> float:
    if value < lo or value > hi:
        clamped = min(hi, max(lo, value))
        logger.warning("%s %.3f clamped to %.3f (range %g..%g)", name, value, clamped, lo, hi)
        return clamped
    return value


@dataclass(frozen=True)
class LayoutConfig:
    ring_width: float = 28.0  # px, 4..100
    arc_padding: float = 0.1  # degrees between adjacent regions, 0..2
    separator: str = "gaps"  # none | lines | gaps
    separator_size_percent: float = 100.0  # 20..300, gaps mode only
    rotation: float = 0.0  # degrees, 0..360
    chart_size: float = 80.0  # percent, 30..100

    def __post_init__(self) -> None:
        if self.separator not in SEPARATOR_MODES:
            raise ValidationError(f"separator must be one of {SEPARATOR_MODES}, got {self.separator!r}")
        object.__setattr__(self, "ring_width", _clamped("ring_width", self.ring_width, 4.0, 100.0))
        object.__setattr__(self, "arc_padding", _clamped("arc_padding", self.arc_padding, 0.0, 2.0))
        object.__setattr__(
            self,
            "separator_size_percent",
            _clamped("separator_size_percent", self.separator_size_percent, 20.0, 300.0),
        )
        object.__setattr__(self, "rotation", _clamped("rotation", self.rotation, 0.0, 360.0))
        object.__setattr__(self, "chart_size", _clamped("chart_size", self.chart_size, 30.0, 100.0))


@dataclass(frozen=True)
class ArcSpan:
    region_index: int
    start_angle: float
    end_angle: float
    inner_radius: float
    outer_radius: float

    @property
    def mid_angle(self) -> float:
        return (self.start_angle + self.end_angle) / 2.0


@dataclass(frozen=True)
class ChordPath:
    source: tuple[float, float]  # (angle, radius)
    target: tuple[float, float]
    control: tuple[float, float]  # viewport point
    width: float
    color: RGB


@dataclass(frozen=True)
class LabelPlacement:
    text: str
    level: str  # lobe | gyrus | subregion | index
    anchor: tuple[float, float]  # viewport point
    angle: float
    radius: float
    orientation: str  # along-arc | radial
    font_px: float
    color: RGB
    visible: bool = True
    # guide arc for along-arc labels (None when radial)
    arc_start: float | None = None
    arc_end: float | None = None


@dataclass(frozen=True)
class SeparatorLine:
    x1: float
    y1: float
    x2: float
    y2: float
    color: RGB
    width: float


@dataclass(frozen=True)
class SceneArc:
    span: ArcSpan
    fill: RGB
    fill_opacity: float
    stroke: RGB
    stroke_width: float


@dataclass(frozen=True)
class Scene:
    width: float
    height: float
    background: RGB
    arcs: tuple[SceneArc, ...]
    separators: tuple[SeparatorLine, ...]
    chords: tuple[ChordPath, ...]
    labels: tuple[LabelPlacement, ...]


def polar_point(angle: float, radius: float) -> tuple[float, float]:
    """Viewport coordinates of (angle clockwise from 12 o'clock, radius)."""
    return CENTER + radius * math.sin(angle), CENTER - radius * math.cos(angle)


def _radii(cfg: LayoutConfig) -> tuple[float, float]:
    outer = BASE_OUTER_RADIUS * cfg.chart_size / 100.0
    return outer - cfg.ring_width, outer


def _boundaries(atlas: Atlas, order: Sequence[int]) -> list[bool]:
    """boundary_after[p]: does the top-level label change between display
    position p and its circular successor?"""
    n = len(order)
    labels = [atlas.lobe_label(idx) for idx in order]
    return [labels[p] != labels[(p + 1) % n] for p in range(n)]


def _walk(atlas: Atlas, order: Sequence[int], cfg: LayoutConfig) -> tuple[list[ArcSpan], list[float]]:
    n = atlas.n
    boundary_after = _boundaries(atlas, order)
    pad = math.radians(cfg.arc_padding)
    gap = math.radians(BASE_GAP_DEG * cfg.separator_size_percent / 100.0) if cfg.separator == "gaps" else 0.0
    gap_total = gap * sum(boundary_after)
    width = (2.0 * math.pi - gap_total - n * pad) / n
    if width <= 0.0:
        max_pad = math.degrees((2.0 * math.pi - gap_total) / n)
        raise InfeasibleLayoutError(
            f"no angular room for {n} regions: reduce arc_padding below {max_pad:.4f} degrees "
            f"or shrink separators (current padding {cfg.arc_padding} deg, "
            f"separator size {cfg.separator_size_percent}%)"
        )
    rotation = math.radians(cfg.rotation)
    inner, outer = _radii(cfg)
    spans: list[ArcSpan] = []
    separator_angles: list[float] = []
    cursor = 0.0
    for pos, region_index in enumerate(order):
        start = cursor
        end = cursor + width
        spans.append(
            ArcSpan(
                region_index=region_index,
                start_angle=start + rotation,
                end_angle=end + rotation,
                inner_radius=inner,
                outer_radius=outer,
            )
        )
        cursor = end + pad
        if boundary_after[pos]:
            separator_angles.append(end + pad / 2.0 + rotation)
            cursor += gap
    return spans, separator_angles


def compute_angles(atlas: Atlas, order: Sequence[int], cfg: LayoutConfig) -> list[ArcSpan]:
    """Equal-width arc spans for every region, in display order."""
    spans, _ = _walk(atlas, order, cfg)
    return spans


def chord_path(span_i: ArcSpan, span_j: ArcSpan, cfg: LayoutConfig,
               width_px: float, color: RGB) -> ChordPath:
    """Quadratic chord between two span midpoints on the inner radius, with
    the single control point at the ring center."""
    if span_i.region_index == span_j.region_index:
        raise ValidationError("chord endpoints must be different regions")
    return ChordPath(
        source=(span_i.mid_angle, span_i.inner_radius),
        target=(span_j.mid_angle, span_j.inner_radius),
        control=(CENTER, CENTER),
        width=width_px,
        color=color,
    )


def _display_runs(atlas: Atlas, spans: Sequence[ArcSpan], level: int) -> list[tuple[str, list[ArcSpan]]]:
    runs: list[tuple[str, list[ArcSpan]]] = []
    for span in spans:
        label = atlas.region(span.region_index).labels[level]
        if runs and runs[-1][0] == label:
            runs[-1][1].append(span)
        else:
            runs.append((label, [span]))
    return runs


def place_labels(atlas: Atlas, spans: Sequence[ArcSpan], style: StyleConfig) -> list[LabelPlacement]:
    """Label placements for all enabled levels, ordered by (level, position).

    Lobe labels sit radially outside the ring at each top-level run center;
    gyrus labels run along the ring (honoring per-gyrus overrides); subregion
    and index labels sit radially outside, one per region.  Levels absent
    from the atlas hierarchy yield nothing."""
    if not spans:
        return []
    toggles = style.label_toggles
    fg = theme_foreground(style)
    outer = spans[0].outer_radius
    out: list[LabelPlacement] = []

    if toggles.lobe:
        for label, run in _display_runs(atlas, spans, 0):
            angle = (run[0].start_angle + run[-1].end_angle) / 2.0
            radius = outer + LOBE_LABEL_OFFSET
            out.append(
                LabelPlacement(
                    text=label,
                    level="lobe",
                    anchor=polar_point(angle, radius),
                    angle=angle,
                    radius=radius,
                    orientation="radial",
                    font_px=style.global_font_px * LOBE_FONT_SCALE,
                    color=fg,
                )
            )

    if toggles.gyrus and atlas.depth >= 2:
        gyrus_level = 1 if atlas.depth >= 2 else 0
        mid_radius = (spans[0].inner_radius + outer) / 2.0
        for label, run in _display_runs(atlas, spans, gyrus_level):
            override = style.gyrus_overrides.get(label)
            if override is not None and override.hidden:
                continue
            text = label
            color = fg
            font_px = style.global_font_px
            if override is not None:
                if override.rename is not None:
                    text = override.rename
                if override.color is not None:
                    color = override.color
                if override.font_px is not None:
                    font_px = override.font_px
            angle = (run[0].start_angle + run[-1].end_angle) / 2.0
            out.append(
                LabelPlacement(
                    text=text,
                    level="gyrus",
                    anchor=polar_point(angle, mid_radius),
                    angle=angle,
                    radius=mid_radius,
                    orientation="along-arc",
                    font_px=font_px,
                    color=color,
                    arc_start=run[0].start_angle,
                    arc_end=run[-1].end_angle,
                )
            )

    band = outer + RADIAL_LABEL_OFFSET
    if toggles.index:
        for span in spans:
            out.append(
                LabelPlacement(
                    text=str(span.region_index),
                    level="index",
                    anchor=polar_point(span.mid_angle, band),
                    angle=span.mid_angle,
                    radius=band,
                    orientation="radial",
                    font_px=style.global_font_px * INDEX_FONT_SCALE,
                    color=fg,
                )
            )
        band += RADIAL_BAND_STEP

    if toggles.subregion and atlas.depth >= 3:
        for span in spans:
            out.append(
                LabelPlacement(
                    text=atlas.region(span.region_index).labels[2],
                    level="subregion",
                    anchor=polar_point(span.mid_angle, band),
                    angle=span.mid_angle,
                    radius=band,
                    orientation="radial",
                    font_px=style.global_font_px * SUBREGION_FONT_SCALE,
                    color=fg,
                )
            )

    rank = {level: k for k, level in enumerate(LABEL_LEVELS)}
    out.sort(key=lambda p: rank[p.level])  # stable: keeps position order within level
    return out


def compute_scene(
    state: ConnectomeState,
    layout: LayoutConfig,
    style: StyleConfig,
    palettes: PaletteSet | None = None,
) -> Scene:
    """Resolve the complete figure: geometry plus colors, ready to render."""
    atlas = state.atlas
    spans, separator_angles = _walk(atlas, state.order, layout)
    fills = arc_colors(style.scheme, atlas, style.arc_mode, style.intensity, palettes)

    selection = state.selection
    arcs = []
    for span in spans:
        opacity = 1.0
        if selection and span.region_index not in selection:
            opacity = UNSELECTED_ARC_OPACITY
        arcs.append(
            SceneArc(
                span=span,
                fill=fills[span.region_index - 1],
                fill_opacity=opacity,
                stroke=style.arc_stroke_color,
                stroke_width=style.arc_stroke_width,
            )
        )

    separators: list[SeparatorLine] = []
    if layout.separator == "lines":
        fg = theme_foreground(style)
        inner, outer = _radii(layout)
        for angle in separator_angles:
            x1, y1 = polar_point(angle, inner - SEPARATOR_OVERHANG)
            x2, y2 = polar_point(angle, outer + SEPARATOR_OVERHANG)
            separators.append(SeparatorLine(x1=x1, y1=y1, x2=x2, y2=y2, color=fg, width=1.0))

    span_by_region = {span.region_index: span for span in spans}
    chords = tuple(
        chord_path(
            span_by_region[e.i],
            span_by_region[e.j],
            layout,
            style.edge_width,
            resolve_edge_color(e, style),
        )
        for e in visible_edges(state)
    )

    labels = tuple(place_labels(atlas, spans, style))

    return Scene(
        width=VIEWPORT,
        height=VIEWPORT,
        background=canvas_background(style),
        arcs=tuple(arcs),
        separators=tuple(separators),
        chords=chords,
        labels=labels,
    )
