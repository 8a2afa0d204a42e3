"""Command line interface: batch rendering, input validation, and format
conversion.

Exit codes: 0 success, 2 argument errors, 3 parse/validation errors,
4 I/O failures.  Output files are written via a temp file and rename, so a
failed run never leaves a partial artifact at --out.
"""

from __future__ import annotations

import argparse
import os
import sys
from pathlib import Path

import numpy as np

from . import project as project_mod
from .atlas import Catalog
from .errors import RingforgeError
from .ingest import (
    Edge,
    edges_to_matrix,
    make_matrix,
    parse_circos_links,
    parse_edge_list,
    parse_matrix,
    write_circos_links,
    write_edge_list,
)
from .layout import LayoutConfig, compute_scene
from .raster import export_png
from .render import render_svg
from .state import (
    FilterSpec,
    add_imported_edges,
    new_state,
    select_edge_endpoints,
    set_filter,
    set_matrix,
    visible_edges,
)
from .style import StyleConfig, load_palette_file, shipped_palettes

ATLAS_PATH_ENV = "RINGFORGE_ATLAS_PATH"
DEMO_SEED = 42


def _build_catalog() -> Catalog:
    raw = os.environ.get(ATLAS_PATH_ENV, "")
    dirs = [d for d in raw.split(os.pathsep) if d]
    return Catalog(extra_dirs=dirs)


def _atomic_write(path: Path, data: bytes) -> None:
    tmp = path.with_name(path.name + f".tmp{os.getpid()}")
    try:
        tmp.write_bytes(data)
        os.replace(tmp, path)
    finally:
        if tmp.exists():
            tmp.unlink(missing_ok=True)


def _parse_filter(text: str) -> FilterSpec:
    parts = text.split(":")
    if parts[0] == "threshold" and len(parts) == 2:
        return FilterSpec.threshold(float(parts[1]))
    if parts[0] == "top" and len(parts) == 3:
        return FilterSpec.top_n(int(parts[1]), parts[2])
    raise argparse.ArgumentTypeError(
        f"bad filter {text!r}: use threshold:<t> or top:<n>:<strongest|weakest|absolute>"
    )


def _demo_matrix(n: int):
    rng = np.random.default_rng(DEMO_SEED)
    values = rng.uniform(-1.0, 1.0, size=(n, n))
    sym = (values + values.T) / 2.0
    np.fill_diagonal(sym, 0.0)
    return make_matrix(sym, source="<demo>")


def cmd_render(args: argparse.Namespace) -> int:
    catalog = _build_catalog()
    palettes = shipped_palettes()
    if args.style:
        palettes = palettes.overlay(load_palette_file(args.style))

    input_flags = sum(1 for f in (args.matrix, args.edges, args.links) if f)
    if args.project:
        if args.atlas or input_flags or args.seed_demo:
            print("render: --project excludes --atlas/--matrix/--edges/--links/--seed-demo",
                  file=sys.stderr)
            return 2
        state, layout, style, _lang = project_mod.load_project(args.project, catalog)
    else:
        atlas_id = args.atlas or ("brainnetome246" if args.seed_demo else None)
        if atlas_id is None:
            print("render: --atlas is required without --project", file=sys.stderr)
            return 2
        if input_flags > 1:
            print("render: use only one of --matrix/--edges/--links", file=sys.stderr)
            return 2
        atlas = catalog.load_atlas(atlas_id)
        state = new_state(atlas)
        layout = LayoutConfig()
        style = StyleConfig()
        if args.seed_demo:
            state = set_matrix(state, _demo_matrix(atlas.n))
        elif args.matrix:
            text = Path(args.matrix).read_text(encoding="utf-8")
            state = set_matrix(state, parse_matrix(text, atlas.n, source=args.matrix))
        elif args.edges:
            edges = parse_edge_list(Path(args.edges).read_text(encoding="utf-8"))
            state = set_matrix(state, edges_to_matrix(edges, atlas.n))
        elif args.links:
            links = parse_circos_links(Path(args.links).read_text(encoding="utf-8"))
            state = add_imported_edges(state, links)

    if args.filter is not None:
        state = select_edge_endpoints(set_filter(state, args.filter))

    out = Path(args.out)
    scene = compute_scene(state, layout, style, palettes)
    svg = render_svg(scene)
    if out.suffix.lower() == ".svg":
        data = svg.text.encode("utf-8")
    elif out.suffix.lower() == ".png":
        data = export_png(svg, scale=args.png_scale)
    else:
        print(f"render: --out must end in .svg or .png, got {out.name}", file=sys.stderr)
        return 2
    _atomic_write(out, data)
    print(f"{state.atlas.n} regions, {len(visible_edges(state))} edges -> {out}")
    return 0


def cmd_validate(args: argparse.Namespace) -> int:
    catalog = _build_catalog()
    if args.links:
        edges = parse_circos_links(Path(args.links).read_text(encoding="utf-8"))
        with_color = sum(1 for e in edges if e.color_override is not None)
        print(f"{args.links}: {len(edges)} links, {with_color} with color overrides")
        return 0
    if args.matrix:
        if not args.atlas:
            print("validate: --matrix requires --atlas", file=sys.stderr)
            return 2
        atlas = catalog.load_atlas(args.atlas)
        matrix = parse_matrix(Path(args.matrix).read_text(encoding="utf-8"), atlas.n,
                              source=args.matrix)
        asym = float(np.abs(matrix.values - matrix.values.T).max())
        print(f"{args.matrix}: {matrix.n}x{matrix.n} matrix, max asymmetry {asym:.3e}")
        return 0
    if args.edges:
        if not args.atlas:
            print("validate: --edges requires --atlas", file=sys.stderr)
            return 2
        atlas = catalog.load_atlas(args.atlas)
        edges = parse_edge_list(Path(args.edges).read_text(encoding="utf-8"))
        edges_to_matrix(edges, atlas.n)  # range check
        print(f"{args.edges}: {len(edges)} edges")
        return 0
    print("validate: pass one of --links/--matrix/--edges", file=sys.stderr)
    return 2


def cmd_convert(args: argparse.Namespace) -> int:
    catalog = _build_catalog()
    text = Path(args.infile).read_text(encoding="utf-8")

    if args.src == "links":
        edges = parse_circos_links(text)
    elif args.src == "edges":
        edges = parse_edge_list(text)
    else:  # matrix
        if not args.atlas:
            print("convert: --from matrix requires --atlas", file=sys.stderr)
            return 2
        atlas = catalog.load_atlas(args.atlas)
        matrix = parse_matrix(text, atlas.n, source=args.infile)
        edges = [
            Edge(i=i, j=j, weight=w, provenance="matrix")
            for i, j, w in matrix.upper_triangle()
            if w > args.min_weight
        ]

    if args.src != "matrix" and args.atlas:
        atlas = catalog.load_atlas(args.atlas)
        edges_to_matrix(edges, atlas.n)  # range check only

    out_text = write_edge_list(edges) if args.dst == "edges" else write_circos_links(edges)
    _atomic_write(Path(args.outfile), out_text.encode("utf-8"))
    print(f"{args.infile}: {len(edges)} edges -> {args.outfile}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="ringforge",
                                     description="Chord-diagram engine for hierarchical connectivity data")
    sub = parser.add_subparsers(dest="command", required=True)

    p_render = sub.add_parser("render", help="render a figure to SVG or PNG")
    p_render.add_argument("--atlas", help="atlas id (required unless --project)")
    p_render.add_argument("--matrix", help="connectivity matrix file")
    p_render.add_argument("--edges", help="edge list file")
    p_render.add_argument("--links", help="Circos link file")
    p_render.add_argument("--filter", type=_parse_filter,
                          help="threshold:<t> or top:<n>:<strongest|weakest|absolute>")
    p_render.add_argument("--style", help="palette overlay file (scheme,key,r,g,b rows)")
    p_render.add_argument("--project", help=".ringproj project file")
    p_render.add_argument("--out", required=True, help="output path (.svg or .png)")
    p_render.add_argument("--png-scale", type=int, default=4, dest="png_scale")
    p_render.add_argument("--seed-demo", action="store_true", dest="seed_demo",
                          help="render a built-in demo figure")
    p_render.set_defaults(func=cmd_render)

    p_validate = sub.add_parser("validate", help="check an input file")
    p_validate.add_argument("--links")
    p_validate.add_argument("--matrix")
    p_validate.add_argument("--edges")
    p_validate.add_argument("--atlas")
    p_validate.set_defaults(func=cmd_validate)

    p_convert = sub.add_parser("convert", help="convert between input formats")
    p_convert.add_argument("--from", dest="src", required=True,
                           choices=("links", "matrix", "edges"))
    p_convert.add_argument("--to", dest="dst", required=True, choices=("edges", "links"))
    p_convert.add_argument("infile")
    p_convert.add_argument("outfile")
    p_convert.add_argument("--atlas")
    p_convert.add_argument("--min-weight", type=float, default=0.0, dest="min_weight",
                           help="matrix conversion keeps weights strictly above this")
    p_convert.set_defaults(func=cmd_convert)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except RingforgeError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return 4


if __name__ == "__main__":
    sys.exit(main())
