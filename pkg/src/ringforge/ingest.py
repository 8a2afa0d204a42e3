"""Connectivity input parsing: delimited matrices, edge lists, Circos link
files, and bracketed manual pairs.

All parsers accept UTF-8 text with LF or CRLF endings and emit canonical
edges (i < j, never a self-loop).  Writers for the same formats live here
too so round-trips stay in one place.
"""

from __future__ import annotations

import logging
import re
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .errors import FormatError, ValidationError
from .style import RGB

logger = logging.getLogger(__name__)

PROVENANCES = ("matrix", "manual", "circos")

#: asymmetry below this is repaired silently, above WARN_ASYMMETRY it is an error
WARN_ASYMMETRY = 1e-9
MAX_ASYMMETRY = 1e-6

_SEGMENT_RE = re.compile(r"^hs(\d+)$")


@dataclass(frozen=True)
class Edge:
    """One connection; always stored with i < j (use make_edge to canonicalize)."""

    i: int
    j: int
    weight: float
    color_override: RGB | None = None
    provenance: str = "matrix"

    def __post_init__(self) -> None:
        if self.i == self.j:
            raise ValidationError(f"self-loop edge ({self.i},{self.j}) not allowed")
        if self.i > self.j:
            raise ValidationError(f"edge ({self.i},{self.j}) not in canonical i < j order")
        if self.provenance not in PROVENANCES:
            raise ValidationError(f"unknown provenance {self.provenance!r}")

    @property
    def pair(self) -> tuple[int, int]:
        return (self.i, self.j)


def make_edge(i: int, j: int, weight: float, color_override: RGB | None = None,
              provenance: str = "matrix") -> Edge:
    """Canonicalizing constructor: swaps indices so i < j."""
    if i > j:
        i, j = j, i
    return Edge(i=i, j=j, weight=weight, color_override=color_override, provenance=provenance)


@dataclass(frozen=True, eq=False)
class ConnectivityMatrix:
    """Symmetric n-by-n weights; the diagonal is ignored by all consumers."""

    n: int
    values: np.ndarray

    def weight(self, i: int, j: int) -> float:
        return float(self.values[i - 1, j - 1])

    def upper_triangle(self) -> Iterable[tuple[int, int, float]]:
        """(i, j, weight) for all 1-based pairs with i < j, in (i, j) order."""
        v = self.values
        for a in range(self.n - 1):
            for b in range(a + 1, self.n):
                yield a + 1, b + 1, float(v[a, b])


def make_matrix(values: np.ndarray, source: str = "<matrix>") -> ConnectivityMatrix:
    """Validate squareness, repair float-noise asymmetry by averaging."""
    arr = np.asarray(values, dtype=float)
    if arr.ndim != 2 or arr.shape[0] != arr.shape[1]:
        raise ValidationError(f"{source}: matrix must be square, got shape {arr.shape}")
    asym = np.abs(arr - arr.T)
    worst = float(asym.max()) if arr.size else 0.0
    if worst > MAX_ASYMMETRY:
        a, b = np.unravel_index(int(asym.argmax()), asym.shape)
        raise ValidationError(
            f"{source}: matrix is asymmetric: |M-M^T| = {worst:.3e} at cell ({a + 1},{b + 1})"
        )
    if worst > WARN_ASYMMETRY:
        logger.warning("%s: asymmetry %.3e repaired by averaging (M+M^T)/2", source, worst)
    sym = (arr + arr.T) / 2.0
    sym.flags.writeable = False
    return ConnectivityMatrix(n=sym.shape[0], values=sym)


def _lines(text: str) -> list[str]:
    return text.replace("\r\n", "\n").replace("\r", "\n").split("\n")


def sniff_delimiter(text: str, expected_n: int | None = None) -> str:
    """Pick ',', '\\t' or ' ' (run-of-spaces) from the first non-empty line.

    A separator whose count on that line equals expected_n - 1 wins; else
    the most frequent; ties break comma > tab > space."""
    first = next((ln for ln in _lines(text) if ln.strip()), "")
    stripped = first.strip()
    counts = [
        (",", stripped.count(",")),
        ("\t", stripped.count("\t")),
        (" ", len(re.findall(r" +", stripped))),
    ]
    if expected_n is not None:
        for sep, cnt in counts:
            if cnt == expected_n - 1:
                return sep
    best = max(c for _, c in counts)
    for sep, cnt in counts:
        if cnt == best:
            return sep


def _split_row(line: str, sep: str) -> list[str]:
    if sep == " ":
        return line.split()
    return [c.strip() for c in line.strip().split(sep)]


def parse_matrix(text: str, expected_n: int, source: str = "<matrix>") -> ConnectivityMatrix:
    """Parse a delimited n-by-n matrix, sniffing the delimiter."""
    if expected_n <= 0:
        raise ValidationError(f"expected_n must be positive, got {expected_n}")
    rows = [(no, ln) for no, ln in enumerate(_lines(text), start=1) if ln.strip()]
    if len(rows) != expected_n:
        raise ValidationError(f"{source}: expected {expected_n} rows, found {len(rows)}")
    sep = sniff_delimiter(text, expected_n)
    out = np.empty((expected_n, expected_n), dtype=float)
    for r, (no, line) in enumerate(rows):
        cells = _split_row(line, sep)
        if len(cells) != expected_n:
            raise ValidationError(
                f"{source}: expected {expected_n} columns, found {len(cells)} (line {no})"
            )
        for c, cell in enumerate(cells):
            try:
                out[r, c] = float(cell)
            except ValueError:
                raise FormatError(
                    f"{source}: non-numeric cell {cell!r} at row {r + 1}, column {c + 1}", line=no
                ) from None
    return make_matrix(out, source=source)


def write_matrix(matrix: ConnectivityMatrix, delimiter: str = ",") -> str:
    """Inverse of parse_matrix; float repr keeps values exact."""
    if delimiter not in (",", "\t", " "):
        raise ValidationError(f"delimiter must be ',', tab or space, got {delimiter!r}")
    rows = []
    for r in range(matrix.n):
        rows.append(delimiter.join(repr(float(v)) for v in matrix.values[r]))
    return "\n".join(rows) + "\n"


def parse_edge_list(text: str) -> list[Edge]:
    """Lines of ``i, j, weight`` (1-indexed), optional 4th field ``#rrggbb``.

    Blank and '#' lines are skipped; duplicate pairs collapse to the last
    occurrence; output is canonical and sorted by (i, j).  Edge lists stand
    in for a sparse matrix, so provenance is "matrix"."""
    found: dict[tuple[int, int], Edge] = {}
    for no, raw in enumerate(_lines(text), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        cells = [c.strip() for c in line.split(",")]
        if len(cells) < 3:
            raise FormatError(f"expected 'i, j, weight', got {len(cells)} fields", line=no)
        if len(cells) > 4:
            raise FormatError(f"too many fields ({len(cells)})", line=no)
        try:
            i, j = int(cells[0]), int(cells[1])
        except ValueError:
            raise FormatError(f"non-integer region index in {cells[:2]}", line=no) from None
        if i == j:
            raise FormatError(f"self-loop ({i},{j})", line=no)
        try:
            weight = float(cells[2])
        except ValueError:
            raise FormatError(f"non-numeric weight {cells[2]!r}", line=no) from None
        color = None
        if len(cells) == 4:
            if not cells[3].startswith("#"):
                raise FormatError(f"optional color field must be #rrggbb, got {cells[3]!r}", line=no)
            color = RGB.parse(cells[3])
        edge = make_edge(i, j, weight, color_override=color, provenance="matrix")
        found[edge.pair] = edge
    return [found[p] for p in sorted(found)]


def write_edge_list(edges: Sequence[Edge]) -> str:
    lines = []
    for e in sorted(edges, key=lambda e: e.pair):
        row = f"{e.i},{e.j},{repr(float(e.weight))}"
        if e.color_override is not None:
            row += f",{e.color_override.css()}"
        lines.append(row)
    return "\n".join(lines) + ("\n" if lines else "")


def _parse_color_attr(value: str, no: int) -> RGB:
    parts = value.split(",")
    if len(parts) != 3:
        raise FormatError(f"color attribute must be r,g,b, got {value!r}", line=no)
    comps = []
    for p in parts:
        try:
            comps.append(int(p))
        except ValueError:
            raise FormatError(f"non-integer color component {p!r}", line=no) from None
    for c in comps:
        if not 0 <= c <= 255:
            raise FormatError(f"color component {c} outside 0-255", line=no)
    return RGB(*comps)


def _parse_segment(token: str, no: int) -> int:
    m = _SEGMENT_RE.match(token)
    if not m:
        raise FormatError(f"malformed segment id {token!r} (expected hs<index>)", line=no)
    return int(m.group(1))


def parse_circos_links(text: str) -> list[Edge]:
    """Circos link lines: ``hs<i> start end hs<j> start end [attr=val ...]``.

    The integer after ``hs`` is the 1-based region index; start/end spans
    are validated as non-negative integers but carry no region meaning here
    (the shipped atlases have no genomic-style coordinates).  ``color=r,g,b``
    becomes the edge color override, ``value=v`` the weight (default 1.0);
    other attributes are ignored.  Duplicate pairs collapse by the largest
    (weight, color) payload so the result is independent of line order."""
    found: dict[tuple[int, int], Edge] = {}
    for no, raw in enumerate(_lines(text), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        tokens = line.split()
        if len(tokens) < 6:
            raise FormatError(
                f"expected six positional fields (hs<i> start end hs<j> start end), got {len(tokens)}",
                line=no,
            )
        i = _parse_segment(tokens[0], no)
        j = _parse_segment(tokens[3], no)
        for tok in (tokens[1], tokens[2], tokens[4], tokens[5]):
            try:
                span = int(tok)
            except ValueError:
                raise FormatError(f"non-integer span coordinate {tok!r}", line=no) from None
            if span < 0:
                raise FormatError(f"negative span coordinate {span}", line=no)
        if i == j:
            raise FormatError(f"self-loop (hs{i} to hs{j})", line=no)
        weight = 1.0
        color: RGB | None = None
        for tok in tokens[6:]:
            if "=" not in tok:
                raise FormatError(f"malformed attribute {tok!r}", line=no)
            key, _, value = tok.partition("=")
            if key == "color":
                color = _parse_color_attr(value, no)
            elif key == "value":
                try:
                    weight = float(value)
                except ValueError:
                    raise FormatError(f"non-numeric value attribute {value!r}", line=no) from None
            # other Circos attributes (thickness, z, ...) are tolerated
        edge = make_edge(i, j, weight, color_override=color, provenance="circos")
        prev = found.get(edge.pair)
        if prev is None or _payload_key(edge) > _payload_key(prev):
            found[edge.pair] = edge
    return [found[p] for p in sorted(found)]


def _payload_key(e: Edge) -> tuple:
    color = e.color_override if e.color_override is not None else RGB(0, 0, 0)
    return (e.weight, e.color_override is not None, tuple(color))


def write_circos_links(edges: Sequence[Edge]) -> str:
    lines = []
    for e in sorted(edges, key=lambda e: e.pair):
        row = f"hs{e.i} 0 1 hs{e.j} 0 1 value={repr(float(e.weight))}"
        if e.color_override is not None:
            c = e.color_override
            row += f" color={c.r},{c.g},{c.b}"
        lines.append(row)
    return "\n".join(lines) + ("\n" if lines else "")


def parse_manual_pairs(text: str) -> list[tuple[int, int]]:
    """Bracketed pairs like ``[1,2],[3,4]``; returns them in input order.

    Pairs are not validated against any atlas here; that happens when they
    are added to the figure state."""
    pairs: list[tuple[int, int]] = []
    pos = 0
    n = len(text)

    def skip_ws(p: int) -> int:
        while p < n and text[p].isspace():
            p += 1
        return p

    def read_int(p: int) -> tuple[int, int]:
        start = p
        while p < n and text[p].isdigit():
            p += 1
        if p == start:
            raise FormatError("expected an integer", offset=start)
        return int(text[start:p]), p

    pos = skip_ws(pos)
    if pos == n:
        return pairs
    while True:
        if pos >= n or text[pos] != "[":
            raise FormatError("expected '['", offset=pos)
        pos = skip_ws(pos + 1)
        a, pos = read_int(pos)
        pos = skip_ws(pos)
        if pos >= n or text[pos] != ",":
            raise FormatError("expected ',' inside pair", offset=pos)
        pos = skip_ws(pos + 1)
        b, pos = read_int(pos)
        pos = skip_ws(pos)
        if pos >= n or text[pos] != "]":
            raise FormatError("expected ']'", offset=pos)
        pairs.append((a, b))
        pos = skip_ws(pos + 1)
        if pos == n:
            return pairs
        if text[pos] != ",":
            raise FormatError("expected ',' between pairs", offset=pos)
        pos = skip_ws(pos + 1)


def edges_to_matrix(edges: Sequence[Edge], n: int) -> ConnectivityMatrix:
    """Dense symmetric matrix from a sparse edge set (indices must fit n)."""
    values = np.zeros((n, n), dtype=float)
    for e in edges:
        if not (1 <= e.i <= n and 1 <= e.j <= n):
            raise ValidationError(f"edge ({e.i},{e.j}) outside region range 1..{n}")
        values[e.i - 1, e.j - 1] = e.weight
        values[e.j - 1, e.i - 1] = e.weight
    values.flags.writeable = False
    return ConnectivityMatrix(n=n, values=values)
