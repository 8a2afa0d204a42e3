"""Hierarchical parcellation model and the built-in atlas catalog.

An atlas is an ordered list of regions, each carrying one label per
hierarchy level (outermost group first, e.g. lobe -> gyrus -> subregion).
Eight parcellations ship as data files under ``data/atlases/``; more can be
registered at runtime from files in the same format:

    id,display_name,kind,level1;level2;...
    index,label_level1,...,label_levelK,hemisphere

Index must run 1..N consecutively.  Hemisphere is ``L``, ``R`` or empty
(empty means derived from the innermost label convention when possible).
"""

from __future__ import annotations

from dataclasses import dataclass
from importlib import resources
from pathlib import Path
from typing import Iterable, Sequence, Union

from .errors import BoundsError, ConflictError, FormatError, NotFoundError, ValidationError

KINDS = ("anatomical", "functional")

#: Built-in atlas ids in catalog order.
BUILTIN_IDS = (
    "brainnetome246",
    "aal90",
    "aal116",
    "schaefer100",
    "schaefer200",
    "schaefer400",
    "power264",
    "dosenbach160",
)

LevelSelector = Union[int, str]


@dataclass(frozen=True)
class AtlasDescriptor:
    id: str
    display_name: str
    roi_count: int
    kind: str
    level_names: tuple[str, ...]

    def __post_init__(self) -> None:
        if self.roi_count <= 0:
            raise ValidationError(f"atlas {self.id!r}: roi_count must be positive")
        if not self.level_names:
            raise ValidationError(f"atlas {self.id!r}: level_names must be non-empty")
        if self.kind not in KINDS:
            raise ValidationError(f"atlas {self.id!r}: kind must be one of {KINDS}")


@dataclass(frozen=True)
class Region:
    index: int  # 1-based
    labels: tuple[str, ...]  # one per hierarchy level, outermost first
    hemisphere: str | None  # "L", "R" or None


@dataclass(frozen=True)
class Atlas:
    descriptor: AtlasDescriptor
    regions: tuple[Region, ...]

    @property
    def n(self) -> int:
        return self.descriptor.roi_count

    @property
    def depth(self) -> int:
        return len(self.descriptor.level_names)

    def region(self, index: int) -> Region:
        if not 1 <= index <= self.n:
            raise BoundsError(f"region index {index} out of range 1..{self.n}")
        return self.regions[index - 1]

    def lobe_label(self, index: int) -> str:
        """Top-level group label (lobe / network)."""
        return self.region(index).labels[0]

    def gyrus_label(self, index: int) -> str:
        """Mid-level group label; the unit of ring reordering."""
        r = self.region(index)
        return r.labels[1] if self.depth >= 2 else r.labels[0]

    def innermost_label(self, index: int) -> str:
        return self.region(index).labels[-1]

    def gyrus_groups(self, order: Sequence[int] | None = None) -> list[tuple[str, list[int]]]:
        """Consecutive runs of the mid-level label over `order` (atlas order
        when omitted); regions of one gyrus may appear in several runs only
        in hand-edited orders, in which case later runs extend the first."""
        seq = list(order) if order is not None else list(range(1, self.n + 1))
        groups: list[tuple[str, list[int]]] = []
        seen: dict[str, int] = {}
        for idx in seq:
            label = self.gyrus_label(idx)
            if groups and groups[-1][0] == label:
                groups[-1][1].append(idx)
            elif label in seen:
                groups[seen[label]][1].append(idx)
            else:
                seen[label] = len(groups)
                groups.append((label, [idx]))
        return groups


def region_label(atlas: Atlas, index: int, level: LevelSelector) -> str:
    """Label of a region at one hierarchy level.

    `level` is a 0-based level index or one of "lobe", "gyrus",
    "subregion", "innermost".
    """
    r = atlas.region(index)
    if isinstance(level, int):
        if not -atlas.depth <= level < atlas.depth:
            raise BoundsError(f"level {level} out of range for depth {atlas.depth}")
        return r.labels[level]
    if level == "lobe":
        return r.labels[0]
    if level == "gyrus":
        return atlas.gyrus_label(index)
    if level == "subregion":
        if atlas.depth < 3:
            raise BoundsError(f"atlas {atlas.descriptor.id!r} has no subregion level")
        return r.labels[2]
    if level == "innermost":
        return r.labels[-1]
    raise BoundsError(f"unknown level selector {level!r}")


def derive_hemisphere(label: str) -> str | None:
    """Hemisphere from common naming conventions (IFG_L_6_3, Precentral_L, LH_Vis_1)."""
    if label.endswith("_L") or "_L_" in label or label.startswith("LH_"):
        return "L"
    if label.endswith("_R") or "_R_" in label or label.startswith("RH_"):
        return "R"
    return None


def _split_lines(text: str) -> list[str]:
    return text.replace("\r\n", "\n").replace("\r", "\n").split("\n")


def parse_atlas_file(text: str, source: str = "<atlas>") -> Atlas:
    """Parse and fully validate one atlas data file."""
    lines = [ln for ln in _split_lines(text)]
    rows = [(no + 1, ln) for no, ln in enumerate(lines) if ln.strip()]
    if not rows:
        raise FormatError(f"{source}: empty atlas file")

    header_no, header = rows[0]
    head = [c.strip() for c in header.split(",")]
    if len(head) != 4:
        raise FormatError(f"{source}: header must be 'id,display_name,kind,levels'", line=header_no)
    atlas_id, display_name, kind, levels_field = head
    level_names = tuple(s.strip() for s in levels_field.split(";") if s.strip())
    if not atlas_id or not level_names:
        raise FormatError(f"{source}: header missing id or level names", line=header_no)
    if kind not in KINDS:
        raise FormatError(f"{source}: kind must be one of {KINDS}, got {kind!r}", line=header_no)

    depth = len(level_names)
    regions: list[Region] = []
    for lineno, line in rows[1:]:
        cells = [c.strip() for c in line.split(",")]
        if len(cells) != depth + 2:
            raise FormatError(
                f"{source}: expected {depth + 2} fields (index, {depth} labels, hemisphere), got {len(cells)}",
                line=lineno,
            )
        try:
            index = int(cells[0])
        except ValueError:
            raise FormatError(f"{source}: non-integer region index {cells[0]!r}", line=lineno) from None
        labels = tuple(cells[1 : 1 + depth])
        if any(not lbl for lbl in labels):
            raise FormatError(f"{source}: empty label in region {index}", line=lineno)
        hemi_field = cells[1 + depth]
        if hemi_field in ("", "none"):
            hemisphere = derive_hemisphere(labels[-1])
        elif hemi_field in ("L", "R"):
            hemisphere = hemi_field
        else:
            raise FormatError(f"{source}: hemisphere must be L, R or empty, got {hemi_field!r}", line=lineno)
        if index != len(regions) + 1:
            raise ValidationError(
                f"{source}: region indices must be 1..N consecutive; row {len(regions) + 1} has index {index}"
            )
        regions.append(Region(index=index, labels=labels, hemisphere=hemisphere))

    if not regions:
        raise FormatError(f"{source}: atlas {atlas_id!r} has no regions")

    descriptor = AtlasDescriptor(
        id=atlas_id,
        display_name=display_name,
        roi_count=len(regions),
        kind=kind,
        level_names=level_names,
    )
    atlas = Atlas(descriptor=descriptor, regions=tuple(regions))
    _validate_regions(atlas, source)
    return atlas


def _validate_regions(atlas: Atlas, source: str) -> None:
    seen_inner: dict[str, int] = {}
    for r in atlas.regions:
        dup = seen_inner.get(r.labels[-1])
        if dup is not None:
            raise ValidationError(
                f"{source}: innermost label {r.labels[-1]!r} duplicated at regions {dup} and {r.index}"
            )
        seen_inner[r.labels[-1]] = r.index
    # every grouping level must form contiguous runs in atlas order
    for level in range(atlas.depth - 1):
        closed: set[str] = set()
        current: str | None = None
        for r in atlas.regions:
            label = r.labels[level]
            if label == current:
                continue
            if label in closed:
                raise ValidationError(
                    f"{source}: level {level} label {label!r} is non-contiguous at region {r.index}"
                )
            if current is not None:
                closed.add(current)
            current = label


def _builtin_dir() -> Path:
    return Path(str(resources.files("ringforge") / "data" / "atlases"))


class Catalog:
    """Atlas registry: the built-ins plus any runtime-registered files."""

    def __init__(self, extra_dirs: Iterable[str | Path] = ()):
        self._paths: dict[str, Path] = {}
        self._order: list[str] = []
        base = _builtin_dir()
        for atlas_id in BUILTIN_IDS:
            path = base / f"{atlas_id}.csv"
            self._paths[atlas_id] = path
            self._order.append(atlas_id)
        self._descriptors: dict[str, AtlasDescriptor] = {}
        for d in extra_dirs:
            for path in sorted(Path(d).glob("*.csv")):
                try:
                    self.register_atlas(path)
                except ConflictError:
                    pass  # built-ins never shadowed

    def _load_path(self, atlas_id: str, path: Path) -> Atlas:
        try:
            text = path.read_text(encoding="utf-8")
        except OSError as exc:
            raise NotFoundError(f"cannot read atlas file {path}: {exc}") from exc
        atlas = parse_atlas_file(text, source=str(path))
        if atlas.descriptor.id != atlas_id:
            raise ValidationError(f"{path}: file declares id {atlas.descriptor.id!r}, expected {atlas_id!r}")
        return atlas

    def list_atlases(self) -> list[AtlasDescriptor]:
        out = []
        for atlas_id in self._order:
            if atlas_id not in self._descriptors:
                self._descriptors[atlas_id] = self._load_path(atlas_id, self._paths[atlas_id]).descriptor
            out.append(self._descriptors[atlas_id])
        return out

    def load_atlas(self, atlas_id: str) -> Atlas:
        path = self._paths.get(atlas_id)
        if path is None:
            raise NotFoundError(f"unknown atlas id {atlas_id!r}")
        atlas = self._load_path(atlas_id, path)
        self._descriptors[atlas_id] = atlas.descriptor
        return atlas

    def register_atlas(self, datafile: str | Path) -> AtlasDescriptor:
        path = Path(datafile)
        atlas = parse_atlas_file(path.read_text(encoding="utf-8"), source=str(path))
        atlas_id = atlas.descriptor.id
        if atlas_id in self._paths:
            raise ConflictError(f"atlas id {atlas_id!r} already registered")
        self._paths[atlas_id] = path
        self._order.append(atlas_id)
        self._descriptors[atlas_id] = atlas.descriptor
        return atlas.descriptor


_default_catalog = Catalog()


def default_catalog() -> Catalog:
    return _default_catalog


def list_atlases() -> list[AtlasDescriptor]:
    return _default_catalog.list_atlases()


def load_atlas(atlas_id: str) -> Atlas:
    return _default_catalog.load_atlas(atlas_id)


def register_atlas(datafile: str | Path) -> AtlasDescriptor:
    return _default_catalog.register_atlas(datafile)
