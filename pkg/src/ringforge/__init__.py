"""ringforge: deterministic chord diagrams for hierarchical connectivity data.

Pipeline: atlas catalog -> data ingestion -> edge filtering/curation ->
circular layout -> styling -> SVG/PNG export.  Everything is reproducible:
identical inputs give byte-identical SVG documents.
"""

from .atlas import (
    Atlas,
    AtlasDescriptor,
    Catalog,
    Region,
    list_atlases,
    load_atlas,
    region_label,
    register_atlas,
)
from .errors import (
    BoundsError,
    ConflictError,
    FormatError,
    InfeasibleLayoutError,
    NotFoundError,
    RasterizationError,
    RingforgeError,
    ValidationError,
    VersionError,
)
from .ingest import (
    ConnectivityMatrix,
    Edge,
    edges_to_matrix,
    make_edge,
    make_matrix,
    parse_circos_links,
    parse_edge_list,
    parse_manual_pairs,
    parse_matrix,
    sniff_delimiter,
    write_circos_links,
    write_edge_list,
    write_matrix,
)
from .layout import (
    ArcSpan,
    ChordPath,
    LabelPlacement,
    LayoutConfig,
    Scene,
    chord_path,
    compute_angles,
    compute_scene,
    place_labels,
)
from .project import load_project, save_project
from .raster import export_png
from .render import SvgDocument, render_svg
from .state import (
    ConnectomeState,
    FilterSpec,
    add_imported_edges,
    add_manual_edges,
    auto_threshold,
    filter_edges,
    new_state,
    remove_manual_edge,
    reorder_gyrus,
    select_edge_endpoints,
    set_edge_color,
    set_filter,
    set_matrix,
    set_selection,
    visible_edges,
)
from .style import (
    RGB,
    GyrusOverride,
    LabelToggles,
    StyleConfig,
    adjust_intensity,
    arc_color,
    arc_colors,
    canvas_background,
    load_palette_file,
    resolve_edge_color,
)

__version__ = "0.1.0"

__all__ = [name for name in dir() if not name.startswith("_")]
