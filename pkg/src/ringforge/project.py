"""Project files (.ringproj): the complete figure state as versioned JSON.

One file captures atlas binding, matrix (inline or by relative path when
large), filter, manual edges, edge colors, selection, ring order, layout
and style, plus a UI language hint.  Loading validates everything against
the atlas catalog before returning, so a bad file never half-applies.
"""

from __future__ import annotations

import json
import math
import os
from pathlib import Path
from typing import Any

from .atlas import Catalog, default_catalog
from .errors import ValidationError, VersionError
from .ingest import ConnectivityMatrix, Edge, make_matrix, parse_matrix, write_matrix
from .layout import LayoutConfig
from .state import ConnectomeState, FilterSpec
from .style import RGB, GyrusOverride, LabelToggles, StyleConfig

FORMAT_VERSION = 1
LANGUAGES = ("en", "zh")

#: matrices whose inline JSON exceeds this move to a sibling .matrix.tsv
INLINE_MATRIX_LIMIT = 512 * 1024


def _color_out(color: RGB | None) -> list[int] | None:
    return None if color is None else [color.r, color.g, color.b]


def _color_in(value: Any, field: str) -> RGB | None:
    if value is None:
        return None
    if not isinstance(value, list) or len(value) != 3:
        raise ValidationError(f"{field}: expected [r,g,b], got {value!r}")
    return RGB(*value)


def _filter_out(spec: FilterSpec) -> dict[str, Any]:
    if spec.mode == "threshold":
        t = "inf" if math.isinf(spec.t) else spec.t
        return {"mode": "threshold", "t": t}
    return {"mode": "top_n", "n": spec.n, "rule": spec.rule}


def _filter_in(value: Any) -> FilterSpec:
    if not isinstance(value, dict):
        raise ValidationError(f"filter: expected object, got {value!r}")
    mode = value.get("mode")
    if mode == "threshold":
        t = value.get("t")
        if t == "inf":
            return FilterSpec.threshold(math.inf)
        if not isinstance(t, (int, float)):
            raise ValidationError(f"filter.t: expected number or 'inf', got {t!r}")
        return FilterSpec.threshold(float(t))
    if mode == "top_n":
        return FilterSpec.top_n(int(value.get("n", 0)), value.get("rule", "strongest"))
    raise ValidationError(f"filter.mode: unknown mode {mode!r}")


def _style_out(style: StyleConfig) -> dict[str, Any]:
    overrides = {}
    for label in sorted(style.gyrus_overrides):
        ov = style.gyrus_overrides[label]
        overrides[label] = {
            "rename": ov.rename,
            "color": _color_out(ov.color),
            "font_px": ov.font_px,
            "hidden": ov.hidden,
        }
    return {
        "scheme": style.scheme,
        "intensity": style.intensity,
        "arc_mode": style.arc_mode,
        "theme": style.theme,
        "background": _color_out(style.background),
        "default_edge_color": _color_out(style.default_edge_color),
        "edge_width": style.edge_width,
        "arc_stroke_width": style.arc_stroke_width,
        "arc_stroke_color": _color_out(style.arc_stroke_color),
        "label_toggles": {
            "lobe": style.label_toggles.lobe,
            "gyrus": style.label_toggles.gyrus,
            "subregion": style.label_toggles.subregion,
            "index": style.label_toggles.index,
        },
        "global_font_px": style.global_font_px,
        "gyrus_overrides": overrides,
    }


def _style_in(value: Any) -> StyleConfig:
    if not isinstance(value, dict):
        raise ValidationError(f"style: expected object, got {value!r}")
    toggles = value.get("label_toggles", {})
    overrides = {}
    for label, ov in value.get("gyrus_overrides", {}).items():
        overrides[label] = GyrusOverride(
            rename=ov.get("rename"),
            color=_color_in(ov.get("color"), f"gyrus_overrides[{label}].color"),
            font_px=ov.get("font_px"),
            hidden=bool(ov.get("hidden", False)),
        )
    return StyleConfig(
        scheme=value.get("scheme", "neon"),
        intensity=int(value.get("intensity", 0)),
        arc_mode=value.get("arc_mode", "flat"),
        theme=value.get("theme", "dark"),
        background=_color_in(value.get("background"), "style.background"),
        default_edge_color=_color_in(value.get("default_edge_color"), "style.default_edge_color")
        or StyleConfig().default_edge_color,
        edge_width=float(value.get("edge_width", 1.5)),
        arc_stroke_width=float(value.get("arc_stroke_width", 0.5)),
        arc_stroke_color=_color_in(value.get("arc_stroke_color"), "style.arc_stroke_color")
        or StyleConfig().arc_stroke_color,
        label_toggles=LabelToggles(
            lobe=bool(toggles.get("lobe", True)),
            gyrus=bool(toggles.get("gyrus", True)),
            subregion=bool(toggles.get("subregion", False)),
            index=bool(toggles.get("index", False)),
        ),
        global_font_px=float(value.get("global_font_px", 12.0)),
        gyrus_overrides=overrides,
    )


def _layout_out(layout: LayoutConfig) -> dict[str, Any]:
    return {
        "ring_width": layout.ring_width,
        "arc_padding": layout.arc_padding,
        "separator": layout.separator,
        "separator_size_percent": layout.separator_size_percent,
        "rotation": layout.rotation,
        "chart_size": layout.chart_size,
    }


def _layout_in(value: Any) -> LayoutConfig:
    if not isinstance(value, dict):
        raise ValidationError(f"layout: expected object, got {value!r}")
    defaults = LayoutConfig()
    return LayoutConfig(
        ring_width=float(value.get("ring_width", defaults.ring_width)),
        arc_padding=float(value.get("arc_padding", defaults.arc_padding)),
        separator=value.get("separator", defaults.separator),
        separator_size_percent=float(
            value.get("separator_size_percent", defaults.separator_size_percent)
        ),
        rotation=float(value.get("rotation", defaults.rotation)),
        chart_size=float(value.get("chart_size", defaults.chart_size)),
    )


def _matrix_out(matrix: ConnectivityMatrix | None, path: Path) -> Any:
    if matrix is None:
        return None
    rows = [[float(v) for v in row] for row in matrix.values]
    inline = json.dumps(rows)
    if len(inline) <= INLINE_MATRIX_LIMIT:
        return {"inline": rows}
    sibling = path.with_suffix(".matrix.tsv")
    sibling.write_text(write_matrix(matrix, "\t"), encoding="utf-8")
    return {"path": sibling.name}


def _matrix_in(value: Any, n: int, base_dir: Path) -> ConnectivityMatrix | None:
    if value is None:
        return None
    if not isinstance(value, dict):
        raise ValidationError(f"matrix: expected object or null, got {value!r}")
    if "inline" in value:
        rows = value["inline"]
        if len(rows) != n or any(len(r) != n for r in rows):
            raise ValidationError(f"matrix.inline: expected {n}x{n} values")
        return make_matrix([[float(v) for v in row] for row in rows], source="matrix.inline")
    if "path" in value:
        target = base_dir / value["path"]
        return parse_matrix(target.read_text(encoding="utf-8"), n, source=str(target))
    raise ValidationError("matrix: needs 'inline' or 'path'")


def save_project(
    state: ConnectomeState,
    layout: LayoutConfig,
    style: StyleConfig,
    path: str | Path,
    language: str = "en",
) -> None:
    """Write the figure to `path`; load_project inverts it."""
    if language not in LANGUAGES:
        raise ValidationError(f"language must be one of {LANGUAGES}, got {language!r}")
    p = Path(path)
    edges_out = [
        {
            "i": e.i,
            "j": e.j,
            "weight": e.weight,
            "color": _color_out(e.color_override),
            "provenance": e.provenance,
        }
        for e in state.manual_edges
    ]
    colors_out = [
        {"i": i, "j": j, "color": _color_out(state.edge_colors[(i, j)])}
        for i, j in sorted(state.edge_colors)
    ]
    doc = {
        "format_version": FORMAT_VERSION,
        "atlas_id": state.atlas.descriptor.id,
        "language": language,
        "matrix": _matrix_out(state.matrix, p),
        "filter": _filter_out(state.filter),
        "manual_edges": edges_out,
        "edge_colors": colors_out,
        "selection": sorted(state.selection),
        "order": list(state.order),
        "layout": _layout_out(layout),
        "style": _style_out(style),
    }
    p.write_text(json.dumps(doc, indent=2, allow_nan=False) + "\n", encoding="utf-8")


def load_project(
    path: str | Path, catalog: Catalog | None = None
) -> tuple[ConnectomeState, LayoutConfig, StyleConfig, str]:
    """Load and validate a project; returns (state, layout, style, language).

    Validation happens before any value is returned, so callers never see a
    partially applied project."""
    p = Path(path)
    try:
        doc = json.loads(p.read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise ValidationError(f"{p}: not valid JSON: {exc}") from exc
    if not isinstance(doc, dict):
        raise ValidationError(f"{p}: expected a JSON object at top level")
    version = doc.get("format_version")
    if version != FORMAT_VERSION:
        raise VersionError(f"{p}: unsupported format_version {version!r} (supported: {FORMAT_VERSION})")

    cat = catalog if catalog is not None else default_catalog()
    atlas_id = doc.get("atlas_id")
    known = {d.id for d in cat.list_atlases()}
    if atlas_id not in known:
        raise ValidationError(f"{p}: unknown atlas {atlas_id!r}")
    atlas = cat.load_atlas(atlas_id)
    n = atlas.n

    language = doc.get("language", "en")
    if language not in LANGUAGES:
        raise ValidationError(f"{p}: language must be one of {LANGUAGES}, got {language!r}")

    matrix = _matrix_in(doc.get("matrix"), n, p.parent)
    spec = _filter_in(doc.get("filter", {"mode": "threshold", "t": "inf"}))

    edges = []
    for item in doc.get("manual_edges", []):
        i, j = int(item["i"]), int(item["j"])
        if not (1 <= i <= n and 1 <= j <= n):
            raise ValidationError(f"{p}: manual_edges: pair ({i},{j}) outside 1..{n}")
        edges.append(
            Edge(
                i=min(i, j),
                j=max(i, j),
                weight=float(item.get("weight", 1.0)),
                color_override=_color_in(item.get("color"), "manual_edges.color"),
                provenance=item.get("provenance", "manual"),
            )
        )

    colors = {}
    for item in doc.get("edge_colors", []):
        i, j = int(item["i"]), int(item["j"])
        if not (1 <= i <= n and 1 <= j <= n):
            raise ValidationError(f"{p}: edge_colors: pair ({i},{j}) outside 1..{n}")
        color = _color_in(item.get("color"), "edge_colors.color")
        if color is None:
            raise ValidationError(f"{p}: edge_colors: pair ({i},{j}) missing color")
        colors[(min(i, j), max(i, j))] = color

    selection = [int(v) for v in doc.get("selection", [])]
    for idx in selection:
        if not 1 <= idx <= n:
            raise ValidationError(f"{p}: selection: region {idx} outside 1..{n}")

    order = [int(v) for v in doc.get("order", range(1, n + 1))]
    if sorted(order) != list(range(1, n + 1)):
        raise ValidationError(f"{p}: order must be a permutation of 1..{n}")

    layout = _layout_in(doc.get("layout", {}))
    style = _style_in(doc.get("style", {}))

    state = ConnectomeState(
        atlas=atlas,
        matrix=matrix,
        filter=spec,
        manual_edges=tuple(edges),
        edge_colors=colors,
        selection=frozenset(selection),
        order=tuple(order),
    )
    return state, layout, style, language


def default_project_dir() -> Path:
    return Path(os.getcwd())
