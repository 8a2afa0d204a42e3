"""Color and label styling: schemes, intensity, themes, per-edge and
per-gyrus overrides.

Arc colors come from one of six schemes.  Five are group-keyed palettes
shipped in ``data/palettes.csv`` (rows ``scheme,key,r,g,b``; key is a
top-level group label or a 1-based region index).  The sixth, ``hah``,
assigns every region its own color by golden-angle hue stepping so that all
regions of an atlas stay pairwise distinct.  A user palette file with the
same schema overlays the shipped one.
"""

from __future__ import annotations

import colorsys
import logging
from dataclasses import dataclass, field
from functools import lru_cache
from importlib import resources
from pathlib import Path
from typing import Mapping, NamedTuple

from .atlas import Atlas
from .errors import FormatError, NotFoundError, ValidationError

logger = logging.getLogger(__name__)

THEMES = ("dark", "light")
ARC_MODES = ("flat", "gradient")

#: L-points per intensity slider unit; maps the +/-80 range to +/-24 L.
INTENSITY_L_PER_UNIT = 0.3
#: Lightness swing across a group in gradient mode (L-points).
GRADIENT_L_SPAN = 15.0
GOLDEN_ANGLE_DEG = 137.508
HAH_S = 65.0
HAH_L = 55.0

DARK_CANVAS = None  # set below, after RGB is defined
LIGHT_CANVAS = None


class _RGBBase(NamedTuple):
    r: int
    g: int
    b: int


class RGB(_RGBBase):
    def __new__(cls, r: int, g: int, b: int) -> "RGB":
        for v in (r, g, b):
            if not isinstance(v, int) or not 0 <= v <= 255:
                raise ValidationError(f"RGB component {v!r} outside 0-255")
        return super().__new__(cls, r, g, b)

    def css(self) -> str:
        return f"#{self.r:02x}{self.g:02x}{self.b:02x}"

    @classmethod
    def parse(cls, text: str) -> "RGB":
        """Accepts 'r,g,b' or '#rrggbb'."""
        t = text.strip()
        if t.startswith("#"):
            if len(t) != 7:
                raise ValidationError(f"bad hex color {text!r}")
            try:
                return cls(int(t[1:3], 16), int(t[3:5], 16), int(t[5:7], 16))
            except ValueError:
                raise ValidationError(f"bad hex color {text!r}") from None
        parts = t.split(",")
        if len(parts) != 3:
            raise ValidationError(f"bad color {text!r}, expected r,g,b")
        try:
            return cls(*(int(p.strip()) for p in parts))
        except ValueError:
            raise ValidationError(f"bad color {text!r}, expected integer components") from None


DARK_CANVAS = RGB(16, 16, 20)
LIGHT_CANVAS = RGB(255, 255, 255)
DARK_FOREGROUND = RGB(230, 230, 235)
LIGHT_FOREGROUND = RGB(26, 26, 30)


def to_hsl(color: RGB) -> tuple[float, float, float]:
    """(hue 0-360, saturation 0-100, lightness 0-100)."""
    h, l, s = colorsys.rgb_to_hls(color.r / 255.0, color.g / 255.0, color.b / 255.0)
    return h * 360.0, s * 100.0, l * 100.0


def from_hsl(h: float, s: float, l: float) -> RGB:
    r, g, b = colorsys.hls_to_rgb((h % 360.0) / 360.0, l / 100.0, s / 100.0)
    return RGB(round(r * 255), round(g * 255), round(b * 255))


def shift_lightness(color: RGB, delta_points: float) -> RGB:
    h, s, l = to_hsl(color)
    return from_hsl(h, s, min(100.0, max(0.0, l + delta_points)))


def adjust_intensity(color: RGB, s: int) -> RGB:
    """Brightness adjustment: lightness moves 0.3 L-points per slider unit,
    clamped to [0, 100].  s = 0 is the exact identity."""
    if not -80 <= s <= 80:
        raise ValidationError(f"intensity {s} outside -80..80")
    if s == 0:
        return color
    return shift_lightness(color, INTENSITY_L_PER_UNIT * s)


@dataclass(frozen=True)
class GyrusOverride:
    rename: str | None = None
    color: RGB | None = None
    font_px: float | None = None
    hidden: bool = False


@dataclass(frozen=True)
class LabelToggles:
    lobe: bool = True
    gyrus: bool = True
    subregion: bool = False
    index: bool = False


@dataclass(frozen=True)
class StyleConfig:
    scheme: str = "neon"
    intensity: int = 0
    arc_mode: str = "flat"
    theme: str = "dark"
    background: RGB | None = None  # overrides the theme canvas color
    default_edge_color: RGB = RGB(205, 92, 92)
    edge_width: float = 1.5
    arc_stroke_width: float = 0.5
    arc_stroke_color: RGB = RGB(20, 20, 24)
    label_toggles: LabelToggles = LabelToggles()
    global_font_px: float = 12.0
    gyrus_overrides: Mapping[str, GyrusOverride] = field(default_factory=dict)

    def __post_init__(self) -> None:
        if self.theme not in THEMES:
            raise ValidationError(f"theme must be one of {THEMES}, got {self.theme!r}")
        if self.arc_mode not in ARC_MODES:
            raise ValidationError(f"arc_mode must be one of {ARC_MODES}, got {self.arc_mode!r}")
        if not -80 <= self.intensity <= 80:
            clamped = min(80, max(-80, self.intensity))
            logger.warning("intensity %d clamped to %d", self.intensity, clamped)
            object.__setattr__(self, "intensity", clamped)


# Anchor cycles for the five group-keyed schemes; also the fallback for
# group labels absent from the palette file (indexed by group ordinal in
# atlas order, so colors stay stable under ring reordering).
SCHEME_CYCLES: dict[str, tuple[RGB, ...]] = {
    "neon": (
        RGB(57, 255, 20), RGB(255, 20, 147), RGB(0, 255, 255), RGB(255, 234, 0),
        RGB(255, 97, 3), RGB(191, 62, 255), RGB(0, 191, 255), RGB(244, 67, 54),
    ),
    "classic": (
        RGB(31, 119, 180), RGB(214, 39, 40), RGB(44, 160, 44), RGB(148, 103, 189),
        RGB(140, 86, 75), RGB(227, 119, 194), RGB(127, 127, 127), RGB(188, 189, 34),
    ),
    "pastel": (
        RGB(174, 199, 232), RGB(255, 187, 120), RGB(152, 223, 138), RGB(255, 152, 150),
        RGB(197, 176, 213), RGB(196, 156, 148), RGB(247, 182, 210), RGB(219, 219, 141),
    ),
    "earth": (
        RGB(141, 110, 99), RGB(85, 139, 47), RGB(191, 144, 0), RGB(109, 76, 65),
        RGB(56, 142, 60), RGB(158, 157, 36), RGB(121, 85, 72), RGB(51, 105, 30),
    ),
    "ocean": (
        RGB(2, 62, 138), RGB(0, 119, 182), RGB(0, 150, 199), RGB(0, 180, 216),
        RGB(72, 202, 228), RGB(3, 4, 94), RGB(144, 224, 239), RGB(97, 165, 194),
    ),
}


class PaletteSet:
    """scheme -> key -> RGB, where key is a group label or region index."""

    def __init__(self, entries: dict[str, dict[str, RGB]] | None = None):
        self.entries: dict[str, dict[str, RGB]] = entries or {}

    @property
    def schemes(self) -> set[str]:
        return set(self.entries)

    def get(self, scheme: str, key: str) -> RGB | None:
        return self.entries.get(scheme, {}).get(key)

    def overlay(self, other: "PaletteSet") -> "PaletteSet":
        merged = {s: dict(m) for s, m in self.entries.items()}
        for scheme, mapping in other.entries.items():
            merged.setdefault(scheme, {}).update(mapping)
        return PaletteSet(merged)


def parse_palette_file(text: str, source: str = "<palette>") -> PaletteSet:
    """Rows ``scheme,key,r,g,b``; blank lines and '#' comments skipped."""
    entries: dict[str, dict[str, RGB]] = {}
    for no, raw in enumerate(text.replace("\r\n", "\n").split("\n"), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        cells = [c.strip() for c in line.split(",")]
        if len(cells) != 5:
            raise FormatError(f"{source}: expected scheme,key,r,g,b", line=no)
        scheme, key, *comps = cells
        try:
            color = RGB(*(int(c) for c in comps))
        except (ValueError, ValidationError):
            raise FormatError(f"{source}: bad color components {comps}", line=no) from None
        entries.setdefault(scheme, {})[key] = color
    return PaletteSet(entries)


def load_palette_file(path: str | Path) -> PaletteSet:
    p = Path(path)
    return parse_palette_file(p.read_text(encoding="utf-8"), source=str(p))


@lru_cache(maxsize=1)
def shipped_palettes() -> PaletteSet:
    text = (resources.files("ringforge") / "data" / "palettes.csv").read_text(encoding="utf-8")
    return parse_palette_file(text, source="data/palettes.csv")


def known_schemes(palettes: PaletteSet | None = None) -> set[str]:
    p = palettes if palettes is not None else shipped_palettes()
    return {"hah"} | set(SCHEME_CYCLES) | p.schemes


@lru_cache(maxsize=8)
def hah_palette(n: int) -> tuple[RGB, ...]:
    """n pairwise-distinct per-region colors via golden-angle hue stepping.

    The base formula alone stays collision-free well past 400 colors; the
    lightness nudge below only engages for very large custom atlases."""
    out: list[RGB] = []
    seen: set[RGB] = set()
    for k in range(n):
        hue = (k * GOLDEN_ANGLE_DEG) % 360.0
        color = from_hsl(hue, HAH_S, HAH_L)
        bump = 1.0
        while color in seen:
            color = from_hsl(hue, HAH_S, HAH_L + bump)
            bump += 1.0
        seen.add(color)
        out.append(color)
    return tuple(out)


def _lobe_positions(atlas: Atlas) -> dict[int, tuple[str, int, int, int]]:
    """region index -> (lobe label, group ordinal, position in group, group size),
    all in atlas order (stable under ring reordering)."""
    out: dict[int, tuple[str, int, int, int]] = {}
    runs: list[tuple[str, list[int]]] = []
    for r in atlas.regions:
        label = r.labels[0]
        if runs and runs[-1][0] == label:
            runs[-1][1].append(r.index)
        else:
            runs.append((label, [r.index]))
    for ordinal, (label, members) in enumerate(runs):
        for pos, idx in enumerate(members):
            out[idx] = (label, ordinal, pos, len(members))
    return out


def _group_base_color(scheme: str, label: str, ordinal: int, palettes: PaletteSet) -> RGB:
    color = palettes.get(scheme, label)
    if color is not None:
        return color
    cycle = SCHEME_CYCLES.get(scheme)
    if cycle is not None:
        return cycle[ordinal % len(cycle)]
    # scheme defined only by a user palette file: derive a stable fallback
    return from_hsl((ordinal * GOLDEN_ANGLE_DEG) % 360.0, 55.0, 50.0)


def arc_colors(
    scheme: str,
    atlas: Atlas,
    arc_mode: str,
    intensity: int,
    palettes: PaletteSet | None = None,
) -> list[RGB]:
    """Resolved fill color for every region, in atlas index order."""
    p = palettes if palettes is not None else shipped_palettes()
    if scheme not in known_schemes(p):
        raise NotFoundError(f"unknown color scheme {scheme!r}")
    if arc_mode not in ARC_MODES:
        raise ValidationError(f"arc_mode must be one of {ARC_MODES}, got {arc_mode!r}")
    hah = hah_palette(atlas.n) if scheme == "hah" else None
    positions = _lobe_positions(atlas)
    out: list[RGB] = []
    for r in atlas.regions:
        override = p.get(scheme, str(r.index))
        if override is not None:
            base = override  # per-region palette entries ignore arc_mode
        elif hah is not None:
            base = hah[r.index - 1]
        else:
            label, ordinal, pos, size = positions[r.index]
            base = _group_base_color(scheme, label, ordinal, p)
            if arc_mode == "gradient" and size > 1:
                delta = -GRADIENT_L_SPAN + 2.0 * GRADIENT_L_SPAN * pos / (size - 1)
                base = shift_lightness(base, delta)
        out.append(adjust_intensity(base, intensity))
    return out


def arc_color(
    scheme: str,
    atlas: Atlas,
    region_index: int,
    arc_mode: str,
    intensity: int,
    palettes: PaletteSet | None = None,
) -> RGB:
    """Fill color for a single region arc (bulk callers use arc_colors)."""
    atlas.region(region_index)  # bounds check
    return arc_colors(scheme, atlas, arc_mode, intensity, palettes)[region_index - 1]


def resolve_edge_color(edge, style: StyleConfig, state_override: RGB | None = None) -> RGB:
    """Precedence: explicit state override > parsed per-edge color > default."""
    if state_override is not None:
        return state_override
    if edge.color_override is not None:
        return edge.color_override
    return style.default_edge_color


def canvas_background(style: StyleConfig) -> RGB:
    if style.background is not None:
        return style.background
    return DARK_CANVAS if style.theme == "dark" else LIGHT_CANVAS


def theme_foreground(style: StyleConfig) -> RGB:
    """Default text/separator color for the active theme."""
    return DARK_FOREGROUND if style.theme == "dark" else LIGHT_FOREGROUND
