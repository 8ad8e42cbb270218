"""Sunburst hierarchy data and pairwise heatmaps."""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field
from typing import Optional
from xml.sax.saxutils import escape

from .hierarchy import ClassHierarchy
from .vocab import OWL_THING, local_name

__all__ = [
    "SunburstNode",
    "build_sunburst",
    "PairMatrix",
    "matrix_to_csv",
    "matrix_from_csv",
    "render_heatmap",
    "OTHER",
]

OTHER = "other"


@dataclass
class SunburstNode:
    class_iri: Optional[str]
    label: str
    count: int
    children: list = field(default_factory=list)
    overlap: bool = False

    def to_dict(self):
        return {
            "classIRI": self.class_iri,
            "label": self.label,
            "count": self.count,
            "overlap": self.overlap,
            "children": [c.to_dict() for c in self.children],
        }

    def walk(self, depth=0):
        yield self, depth
        for c in self.children:
            yield from c.walk(depth + 1)


def _strip(key):
    return key[1:-1] if key.startswith("<") else key


def build_sunburst(hierarchy: ClassHierarchy, max_depth=3, top_k=12, total_instances=None) -> SunburstNode:
    """Class sizes from the top concept downward.

    At every node the ``top_k`` largest subclasses (ties broken by IRI) are
    kept; whatever the kept children do not account for goes to an
    ``other`` node.  Children may overlap through multi-typed instances, in
    which case the node is flagged and ``other`` is omitted.
    """
    if max_depth < 0 or top_k < 0:
        raise ValueError("max_depth and top_k must be non-negative")
    names = hierarchy.names

    def expand(node_ids, parent_count, depth):
        if depth > max_depth or not node_ids:
            return [], False
        ranked = sorted(node_ids, key=lambda n: (-hierarchy.transitive_count(n), names[n]))
        kept = ranked[:top_k]
        children = []
        for n in kept:
            sub, sub_overlap = expand(hierarchy.children[n], hierarchy.transitive_count(n), depth + 1)
            children.append(SunburstNode(_strip(names[n]), local_name(names[n]), hierarchy.transitive_count(n),
                                         sub, sub_overlap))
        covered = sum(c.count for c in children)
        rest = parent_count - covered
        if rest > 0:
            children.append(SunburstNode(None, OTHER, rest))
        return children, rest < 0

    if hierarchy.top is not None:
        top = hierarchy.top
        count = hierarchy.transitive_count(top)
        children, overlap = expand(hierarchy.children[top], count, 1)
        return SunburstNode(_strip(names[top]), local_name(names[top]), count, children, overlap)
    if total_instances is None:
        total_instances = len(hierarchy.all_instances())
    children, overlap = expand(hierarchy.roots, total_instances, 1)
    return SunburstNode(_strip(OWL_THING), "Thing", total_instances, children, overlap)


@dataclass
class PairMatrix:
    """Square matrix over graph labels; ``None`` marks an undefined cell."""

    labels: list
    cells: list

    def __post_init__(self):
        n = len(self.labels)
        if len(self.cells) != n or any(len(row) != n for row in self.cells):
            raise ValueError("PairMatrix must be square and match its labels")

    @classmethod
    def empty(cls, labels, diagonal):
        n = len(labels)
        return cls(list(labels), [[diagonal if i == j else None for j in range(n)] for i in range(n)])

    def __getitem__(self, ij):
        i, j = ij
        return self.cells[i][j]

    def __setitem__(self, ij, value):
        i, j = ij
        self.cells[i][j] = value


def matrix_to_csv(matrix: PairMatrix) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow([""] + list(matrix.labels))
    for label, row in zip(matrix.labels, matrix.cells):
        writer.writerow([label] + ["" if v is None else f"{v:.4f}" for v in row])
    return buf.getvalue()


def matrix_from_csv(text) -> PairMatrix:
    rows = list(csv.reader(io.StringIO(text)))
    labels = rows[0][1:]
    cells = [[float(v) if v != "" else None for v in row[1:]] for row in rows[1:]]
    return PairMatrix(labels, cells)


_LIGHT = (247, 251, 255)
_DARK = (8, 48, 107)


def _color(value):
    t = min(1.0, max(0.0, value))
    r, g, b = (round(lo + (hi - lo) * t) for lo, hi in zip(_LIGHT, _DARK))
    return f"#{r:02x}{g:02x}{b:02x}"


def _svg(matrix, cell=56, margin=110, title=None):
    n = len(matrix.labels)
    width = height = margin + n * cell + 10
    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
        f'viewBox="0 0 {width} {height}" font-family="sans-serif" font-size="11">',
        "<defs><pattern id=\"hatch\" width=\"6\" height=\"6\" patternUnits=\"userSpaceOnUse\" "
        "patternTransform=\"rotate(45)\"><rect width=\"6\" height=\"6\" fill=\"#ffffff\"/>"
        "<line x1=\"0\" y1=\"0\" x2=\"0\" y2=\"6\" stroke=\"#999999\" stroke-width=\"2\"/></pattern></defs>",
    ]
    if title:
        out.append(f'<title>{escape(title)}</title>')
    for i, label in enumerate(matrix.labels):
        y = margin + i * cell + cell / 2
        out.append(f'<text class="row-label" x="{margin - 6}" y="{y:g}" text-anchor="end" '
                   f'dominant-baseline="middle">{escape(str(label))}</text>')
        x = margin + i * cell + cell / 2
        out.append(f'<text class="col-label" x="{x:g}" y="{margin - 6}" text-anchor="start" '
                   f'transform="rotate(-45 {x:g} {margin - 6})">{escape(str(label))}</text>')
    for i in range(n):
        for j in range(n):
            v = matrix.cells[i][j]
            x, y = margin + j * cell, margin + i * cell
            defined = v is not None and not math.isnan(v)
            fill = _color(v) if defined else "url(#hatch)"
            out.append(f'<rect class="cell" x="{x}" y="{y}" width="{cell}" height="{cell}" '
                       f'fill="{fill}" stroke="#ffffff"/>')
            if defined:
                ink = "#ffffff" if v > 0.5 else "#000000"
                out.append(f'<text class="value" x="{x + cell / 2:g}" y="{y + cell / 2:g}" text-anchor="middle" '
                           f'dominant-baseline="middle" fill="{ink}">{v:.2f}</text>')
    out.append("</svg>")
    return "\n".join(out) + "\n"


def render_heatmap(matrix: PairMatrix, fmt="csv", title=None) -> bytes:
    """Serialize ``matrix`` as CSV (4 decimals, empty = undefined) or a static SVG grid."""
    if fmt == "csv":
        return matrix_to_csv(matrix).encode("utf-8")
    if fmt == "svg":
        return _svg(matrix, title=title).encode("utf-8")
    raise ValueError(f"unknown heatmap format {fmt!r}")
