"""Mutable figure state as an immutable value: matrix, filter, manual edges,
per-edge colors, selection, and ring order.

Every operation returns a new state (copy-on-mutate).  Edges, colors and the
matrix are keyed by immutable 1-based atlas indices, so they keep joining
the same labeled regions under any ring reordering; the ``order`` tuple only
says which region sits at which ring slot.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Iterable, Mapping, Sequence

import numpy as np

from .atlas import Atlas
from .errors import BoundsError, NotFoundError, ValidationError
from .ingest import ConnectivityMatrix, Edge, make_edge
from .style import RGB

FILTER_MODES = ("threshold", "top_n")
TOP_N_RULES = ("strongest", "weakest", "absolute")

#: default edge budget for the automatic threshold on matrix upload
DEFAULT_AUTO_EDGES = 100


@dataclass(frozen=True)
class FilterSpec:
    mode: str
    t: float = math.inf
    n: int = 0
    rule: str = "strongest"

    def __post_init__(self) -> None:
        if self.mode not in FILTER_MODES:
            raise ValidationError(f"filter mode must be one of {FILTER_MODES}, got {self.mode!r}")
        if self.mode == "top_n" and self.n < 0:
            raise ValidationError(f"top_n count must be >= 0, got {self.n}")
        if self.rule not in TOP_N_RULES:
            raise ValidationError(f"top_n rule must be one of {TOP_N_RULES}, got {self.rule!r}")

    @classmethod
    def threshold(cls, t: float) -> "FilterSpec":
        return cls(mode="threshold", t=t)

    @classmethod
    def top_n(cls, n: int, rule: str = "strongest") -> "FilterSpec":
        return cls(mode="top_n", n=n, rule=rule)


@dataclass(frozen=True)
class ConnectomeState:
    atlas: Atlas
    matrix: ConnectivityMatrix | None = None
    filter: FilterSpec = FilterSpec.threshold(math.inf)
    manual_edges: tuple[Edge, ...] = ()
    edge_colors: Mapping[tuple[int, int], RGB] = field(default_factory=dict)
    selection: frozenset[int] = frozenset()
    order: tuple[int, ...] = ()

    def __post_init__(self) -> None:
        n = self.atlas.n
        if sorted(self.order) != list(range(1, n + 1)):
            raise ValidationError("order must be a permutation of 1..N")
        if not all(1 <= i <= n for i in self.selection):
            raise ValidationError("selection contains out-of-range region indices")
        for e in self.manual_edges:
            _check_pair(self.atlas, e.i, e.j)
        if self.matrix is not None and self.matrix.n != n:
            raise ValidationError(
                f"matrix size {self.matrix.n} does not match atlas roi_count {n}"
            )


def new_state(atlas: Atlas) -> ConnectomeState:
    return ConnectomeState(atlas=atlas, order=tuple(range(1, atlas.n + 1)))


def _check_pair(atlas: Atlas, i: int, j: int) -> None:
    if i == j:
        raise ValidationError(f"self-loop ({i},{j}) not allowed")
    for idx in (i, j):
        if not 1 <= idx <= atlas.n:
            raise ValidationError(f"pair ({i},{j}): region {idx} outside 1..{atlas.n}")


def auto_threshold(matrix: ConnectivityMatrix, k: int) -> float:
    """The k-th largest nonzero upper-triangle weight (k clamped to the
    nonzero count); +inf sentinel when every weight is zero."""
    if k < 1:
        raise ValidationError(f"k must be >= 1, got {k}")
    iu, ju = np.triu_indices(matrix.n, k=1)
    weights = matrix.values[iu, ju]
    nonzero = weights[weights != 0.0]
    if nonzero.size == 0:
        return math.inf
    ranked = np.sort(nonzero)[::-1]
    return float(ranked[min(k, ranked.size) - 1])


def filter_edges(matrix: ConnectivityMatrix, spec: FilterSpec) -> list[Edge]:
    """Apply a filter to all upper-triangle entries; result sorted by (i, j).

    Threshold keeps weights >= t (inclusive, on signed values).  Top-N ranks
    by the rule with ties broken by ascending (i, j)."""
    iu, ju = np.triu_indices(matrix.n, k=1)
    w = matrix.values[iu, ju]
    if spec.mode == "threshold":
        picked = np.nonzero(w >= spec.t)[0]  # triu order is already (i, j) sorted
    else:
        count = min(spec.n, w.size)
        if count == 0:
            return []
        if spec.rule == "strongest":
            rank_key = -w
        elif spec.rule == "weakest":
            rank_key = w
        else:
            rank_key = -np.abs(w)
        ranked = np.lexsort((ju, iu, rank_key))[:count]
        picked = ranked[np.lexsort((ju[ranked], iu[ranked]))]
    return [
        Edge(i=int(iu[p]) + 1, j=int(ju[p]) + 1, weight=float(w[p]), provenance="matrix")
        for p in picked
    ]


def visible_edges(state: ConnectomeState) -> list[Edge]:
    """Filtered matrix edges plus manual/imported ones, deduplicated by pair
    with manual taking precedence; state color overrides applied; sorted."""
    merged: dict[tuple[int, int], Edge] = {}
    if state.matrix is not None:
        for e in filter_edges(state.matrix, state.filter):
            merged[e.pair] = e
    for e in state.manual_edges:
        merged[e.pair] = e
    out = []
    for pair in sorted(merged):
        e = merged[pair]
        override = state.edge_colors.get(pair)
        if override is not None:
            e = replace(e, color_override=override)
        out.append(e)
    return out


def _visible_pairs(state: ConnectomeState) -> set[tuple[int, int]]:
    pairs = {e.pair for e in state.manual_edges}
    if state.matrix is not None:
        pairs.update(e.pair for e in filter_edges(state.matrix, state.filter))
    return pairs


def _pruned_colors(state: ConnectomeState) -> dict[tuple[int, int], RGB]:
    pairs = _visible_pairs(state)
    return {p: c for p, c in state.edge_colors.items() if p in pairs}


def set_matrix(state: ConnectomeState, matrix: ConnectivityMatrix,
               k: int = DEFAULT_AUTO_EDGES) -> ConnectomeState:
    """Bind a matrix, auto-adjust the threshold to show ~k edges, and select
    every region touched by a supra-threshold connection."""
    if matrix.n != state.atlas.n:
        raise ValidationError(
            f"matrix size {matrix.n} does not match atlas roi_count {state.atlas.n}"
        )
    spec = FilterSpec.threshold(auto_threshold(matrix, k))
    shown = filter_edges(matrix, spec)
    selection = frozenset(idx for e in shown for idx in e.pair)
    next_state = replace(state, matrix=matrix, filter=spec, selection=selection)
    return replace(next_state, edge_colors=_pruned_colors(next_state))


def set_filter(state: ConnectomeState, spec: FilterSpec) -> ConnectomeState:
    next_state = replace(state, filter=spec)
    return replace(next_state, edge_colors=_pruned_colors(next_state))


def set_selection(state: ConnectomeState, indices: Iterable[int]) -> ConnectomeState:
    return replace(state, selection=frozenset(indices))


def select_edge_endpoints(state: ConnectomeState) -> ConnectomeState:
    return replace(
        state, selection=frozenset(idx for e in visible_edges(state) for idx in e.pair)
    )


def add_manual_edges(state: ConnectomeState, pairs: Sequence[tuple[int, int]]) -> ConnectomeState:
    """Append manual edges (weight 1.0); duplicates of existing ones are no-ops."""
    existing = {e.pair for e in state.manual_edges}
    added = list(state.manual_edges)
    for i, j in pairs:
        _check_pair(state.atlas, i, j)
        edge = make_edge(i, j, 1.0, provenance="manual")
        if edge.pair in existing:
            continue
        existing.add(edge.pair)
        added.append(edge)
    return replace(state, manual_edges=tuple(added))


def add_imported_edges(state: ConnectomeState, edges: Sequence[Edge]) -> ConnectomeState:
    """Append parsed edges (e.g. Circos links) keeping weight/color/provenance;
    pairs already present are no-ops."""
    existing = {e.pair for e in state.manual_edges}
    added = list(state.manual_edges)
    for e in edges:
        _check_pair(state.atlas, e.i, e.j)
        if e.pair in existing:
            continue
        existing.add(e.pair)
        added.append(e)
    return replace(state, manual_edges=tuple(added))


def remove_manual_edge(state: ConnectomeState, i: int, j: int) -> ConnectomeState:
    pair = (min(i, j), max(i, j))
    kept = tuple(e for e in state.manual_edges if e.pair != pair)
    if len(kept) == len(state.manual_edges):
        raise NotFoundError(f"no manual edge ({pair[0]},{pair[1]})")
    next_state = replace(state, manual_edges=kept)
    return replace(next_state, edge_colors=_pruned_colors(next_state))


def set_edge_color(state: ConnectomeState, i: int, j: int, color: RGB | None) -> ConnectomeState:
    """Set or clear the color override of a currently visible edge."""
    pair = (min(i, j), max(i, j))
    if pair not in _visible_pairs(state):
        raise NotFoundError(f"edge ({pair[0]},{pair[1]}) is not currently visible")
    colors = dict(state.edge_colors)
    if color is None:
        colors.pop(pair, None)
    else:
        colors[pair] = color
    return replace(state, edge_colors=colors)


def reorder_gyrus(state: ConnectomeState, gyrus_label: str, target_position: int) -> ConnectomeState:
    """Move a gyrus group to a 0-based slot among the groups of the current
    ring order.  Data is keyed by atlas indices, so edges, colors, matrix and
    selection keep referring to the same labeled regions by construction."""
    groups = state.atlas.gyrus_groups(state.order)
    labels = [label for label, _ in groups]
    if gyrus_label not in labels:
        raise NotFoundError(f"unknown gyrus {gyrus_label!r}")
    if not 0 <= target_position < len(groups):
        raise BoundsError(
            f"target position {target_position} outside 0..{len(groups) - 1}"
        )
    current = labels.index(gyrus_label)
    moved = groups.pop(current)
    groups.insert(target_position, moved)
    order = tuple(idx for _, members in groups for idx in members)
    return replace(state, order=order)
