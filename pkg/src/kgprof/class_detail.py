"""Per-class detail statistics for a configurable set of canonical classes."""

from __future__ import annotations

import csv
import io
import json
from dataclasses import asdict, dataclass, field
from importlib import resources

import numpy as np

from .hierarchy import ClassHierarchy
from .index import ALL_ASSERTIONS, ENTITY_EDGES, IN, OUT, DatasetIndex, degree_array
from .profiler import lower_median

__all__ = [
    "ClassMapping",
    "ClassDetail",
    "load_mappings",
    "default_mappings",
    "class_members",
    "class_stats",
    "class_table",
    "table_to_csv",
]


@dataclass(frozen=True)
class ClassMapping:
    canonical_name: str
    per_graph: dict = field(default_factory=dict)

    def iris_for(self, graph):
        """Class IRIs for ``graph``; the ``"*"`` entry applies to unlisted graphs."""
        return tuple(self.per_graph.get(graph, self.per_graph.get("*", ())))


@dataclass
class ClassDetail:
    canonical_name: str
    instances: int = 0
    avg_degree: float = 0.0
    median_in: int = 0
    median_out: int = 0
    absent: bool = False
    unresolved: list = field(default_factory=list)

    def to_dict(self):
        return asdict(self)


def load_mappings(source) -> list:
    """Read a mapping file: ``{"classes": [{"name": ..., "graphs": {label: [iri, ...]}}]}``."""
    if hasattr(source, "read"):
        data = json.load(source)
    else:
        with open(source, encoding="utf-8") as fh:
            data = json.load(fh)
    return [ClassMapping(entry["name"], {g: list(v) for g, v in entry.get("graphs", {}).items()})
            for entry in data["classes"]]


def default_mappings() -> list:
    with resources.files("kgprof.data").joinpath("default_classes.json").open(encoding="utf-8") as fh:
        return load_mappings(fh)


def _key(iri):
    return iri if iri.startswith("<") else "<" + iri + ">"


def class_members(index: DatasetIndex, hierarchy: ClassHierarchy, class_iris) -> tuple:
    """Union of the transitive instance populations of ``class_iris``.

    Returns ``(members, unresolved)``; IRIs missing from the graph or not
    classes in it are listed in ``unresolved`` instead of failing.
    """
    members = set()
    unresolved = []
    for iri in class_iris:
        cid = index.lookup(_key(iri))
        node = hierarchy.node_of.get(cid) if cid is not None else None
        if node is None:
            unresolved.append(iri)
            continue
        members |= hierarchy.transitive_instances[node]
    return members, unresolved


def class_stats(index: DatasetIndex, members, name="", partition=None) -> ClassDetail:
    """Detail statistics restricted to ``members``.

    ``avg_degree`` is outgoing inter-instance edges per member; medians use
    the same populations as the graph profile (in: entity edges, out: all
    assertions).
    """
    if not members:
        return ClassDetail(name, absent=True)
    ids = np.fromiter(sorted(members), dtype=np.int64, count=len(members))
    out_ent = degree_array(index, OUT, ENTITY_EDGES, partition)[ids]
    in_ent = degree_array(index, IN, ENTITY_EDGES, partition)[ids]
    out_all = degree_array(index, OUT, ALL_ASSERTIONS, partition)[ids]
    return ClassDetail(
        canonical_name=name,
        instances=int(ids.size),
        avg_degree=int(out_ent.sum()) / ids.size,
        median_in=lower_median(in_ent),
        median_out=lower_median(out_all),
    )


def class_table(index, hierarchy, mappings, graph, strict=False) -> list:
    """One :class:`ClassDetail` per mapping for graph label ``graph``.

    With ``strict=True`` an unresolvable IRI raises ``KeyError``.
    """
    rows = []
    for mapping in mappings:
        iris = mapping.iris_for(graph)
        members, unresolved = class_members(index, hierarchy, iris)
        if strict and unresolved:
            raise KeyError(f"{mapping.canonical_name}: unknown class IRIs {unresolved}")
        detail = class_stats(index, members, mapping.canonical_name)
        detail.unresolved = unresolved
        rows.append(detail)
    return rows


CSV_COLUMNS = ("Class", "Instances", "Avg. Deg.", "Med-in", "Med-out")


def table_to_csv(rows) -> str:
    """CSV laid out like the published detail table; absent classes become ``-``."""
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_COLUMNS)
    for r in rows:
        if r.absent:
            writer.writerow([r.canonical_name, "-", "-", "-", "-"])
        else:
            writer.writerow([r.canonical_name, r.instances, f"{r.avg_degree:.2f}", r.median_in, r.median_out])
    return buf.getvalue()
