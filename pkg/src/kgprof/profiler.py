"""Graph-level metrics: instance and assertion counts, degrees, schema shape
and description-logic expressivity."""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass, fields

import numpy as np
from sklearn.base import BaseEstimator

from . import vocab
from .hierarchy import ClassHierarchy, build_hierarchy
from .index import ALL_ASSERTIONS, ENTITY_EDGES, IN, OUT, DatasetIndex, TermPartition, build_index, degree_array
from .ntriples import parse_ntriples
from .validation import check_is_fitted

__all__ = [
    "ProfileReport",
    "lower_median",
    "general_metrics",
    "schema_metrics",
    "detect_expressivity",
    "profile",
    "KGProfiler",
]

# JSON field name -> row label of the published metrics table.
ROW_NAMES = {
    "instances": "# Instances",
    "assertions": "# Assertions",
    "avg_linking_degree": "Avg. linking degree",
    "median_ingoing_edges": "Median ingoing edges",
    "median_outgoing_edges": "Median outgoing edges",
    "classes": "# Classes",
    "relations": "# Relations",
    "avg_depth_of_class_tree": "Avg. depth of class tree",
    "avg_branching_factor_of_class_tree": "Avg. branching factor of class tree",
    "ontology_complexity": "Ontology complexity",
}


@dataclass
class ProfileReport:
    instances: int = 0
    assertions: int = 0
    avg_linking_degree: float = 0.0
    median_ingoing_edges: int = 0
    median_outgoing_edges: int = 0
    classes: int = 0
    relations: int = 0
    avg_depth_of_class_tree: float = 0.0
    avg_branching_factor_of_class_tree: float = 0.0
    ontology_complexity: str = "AL"
    # not in the published table, reported for transparency
    entity_edges: int = 0
    dual_typed_terms: int = 0
    condensed_class_nodes: int = 0
    triples: int = 0

    def to_dict(self):
        return asdict(self)

    def to_json(self, graph=None):
        doc = {"graph": graph, "rowNames": ROW_NAMES, "metrics": self.to_dict()}
        return json.dumps(doc, indent=2, sort_keys=True)

    @classmethod
    def from_dict(cls, data):
        names = {f.name for f in fields(cls)}
        return cls(**{k: v for k, v in data.items() if k in names})


def lower_median(values) -> int:
    """Element at 1-based position ceil(n/2) of the sorted values; 0 when empty."""
    arr = np.asarray(values)
    if arr.size == 0:
        return 0
    k = (arr.size + 1) // 2 - 1
    return int(np.partition(arr, k)[k])


def _instance_ids(partition):
    return np.fromiter(sorted(partition.instances), dtype=np.int64, count=len(partition.instances))


def general_metrics(index: DatasetIndex, partition: TermPartition) -> dict:
    """Instance-level fields of :class:`ProfileReport` as a dict."""
    inst = _instance_ids(partition)
    n = int(inst.size)
    if n == 0:
        return dict(instances=0, assertions=0, avg_linking_degree=0.0,
                    median_ingoing_edges=0, median_outgoing_edges=0, entity_edges=0)
    out_all = degree_array(index, OUT, ALL_ASSERTIONS, partition)[inst]
    out_ent = degree_array(index, OUT, ENTITY_EDGES, partition)[inst]
    in_ent = degree_array(index, IN, ENTITY_EDGES, partition)[inst]
    edges = int(out_ent.sum())
    return dict(
        instances=n,
        assertions=int(out_all.sum()),
        avg_linking_degree=edges / n,
        median_ingoing_edges=lower_median(in_ent),
        median_outgoing_edges=lower_median(out_all),
        entity_edges=edges,
    )


def schema_metrics(hierarchy: ClassHierarchy, partition: TermPartition) -> dict:
    """Schema-level fields: class/relation counts and class-tree shape.

    Depth is averaged over all condensed nodes (roots have depth 0); the
    branching factor over nodes with at least one child.
    """
    size = len(hierarchy)
    fan = [len(c) for c in hierarchy.children if c]
    return dict(
        classes=len(partition.classes),
        relations=len(partition.relations),
        avg_depth_of_class_tree=sum(hierarchy.depth) / size if size else 0.0,
        avg_branching_factor_of_class_tree=sum(fan) / len(fan) if fan else 0.0,
        condensed_class_nodes=size,
        dual_typed_terms=len(partition.dual_typed),
    )


def _owl(name):
    return vocab.iri(vocab.OWL + name)


_C_MARKERS = (_owl("complementOf"), _owl("unionOf"))
_S_MARKERS = (_owl("TransitiveProperty"),)
_R_MARKERS = (_owl("propertyChainAxiom"), _owl("hasSelf"))
_O_MARKERS = (_owl("oneOf"), _owl("hasValue"))
_I_MARKERS = (_owl("inverseOf"), _owl("SymmetricProperty"))
_F_MARKERS = (_owl("FunctionalProperty"), _owl("InverseFunctionalProperty"))
_N_MARKERS = (_owl("cardinality"), _owl("minCardinality"), _owl("maxCardinality"))
_Q_MARKERS = (_owl("qualifiedCardinality"), _owl("minQualifiedCardinality"), _owl("maxQualifiedCardinality"))
_D_MARKERS = (vocab.OWL_DATATYPE_PROPERTY,)


def detect_expressivity(index: DatasetIndex) -> str:
    """Description-logic name implied by the OWL constructs used in ``index``.

    >>> detect_expressivity(build_index([]))
    'AL'
    """
    present = index.ids.__contains__

    def any_of(markers):
        return any(present(m) for m in markers)

    if any_of(_S_MARKERS):
        name = "S"
    elif any_of(_C_MARKERS):
        name = "ALC"
    else:
        name = "AL"
    if any_of(_R_MARKERS):
        name += "R"
    else:
        sub_s, sub_o = index.triples_with_predicate(vocab.RDFS_SUBPROPERTYOF)
        reserved = index.is_reserved
        if np.any(~reserved[sub_s] & ~reserved[sub_o]):
            name += "H"
    if any_of(_O_MARKERS):
        name += "O"
    if any_of(_I_MARKERS):
        name += "I"
    if any_of(_Q_MARKERS):
        name += "Q"
    elif any_of(_N_MARKERS):
        name += "N"
    elif any_of(_F_MARKERS):
        name += "F"
    if any_of(_D_MARKERS) or any('"^^<' in t for t in index.terms if t[0] == '"'):
        name += "D"
    return name


def profile(index: DatasetIndex, partition=None, hierarchy=None) -> ProfileReport:
    partition = partition if partition is not None else index.partition
    hierarchy = hierarchy if hierarchy is not None else build_hierarchy(index, partition)
    values = general_metrics(index, partition)
    values.update(schema_metrics(hierarchy, partition))
    values["ontology_complexity"] = detect_expressivity(index)
    values["triples"] = index.triple_count
    return ProfileReport(**values)


class KGProfiler(BaseEstimator):
    """Profile one knowledge graph.

    ``fit`` accepts a path to an N-Triples dump, an already built
    :class:`~kgprof.index.DatasetIndex`, or any iterable of triples.

    Attributes
    ----------
    index_ : DatasetIndex
    partition_ : TermPartition
    hierarchy_ : ClassHierarchy
    report_ : ProfileReport
    parse_report_ : ParseReport or None
    """

    def __init__(self, label_predicates=(vocab.RDFS_LABEL,), strict=False, max_terms=None):
        self.label_predicates = label_predicates
        self.strict = strict
        self.max_terms = max_terms

    def fit(self, X, y=None):
        self.parse_report_ = None
        if isinstance(X, DatasetIndex):
            index = X
        else:
            if isinstance(X, (str, bytes)) or hasattr(X, "__fspath__") or hasattr(X, "read"):
                X = parse_ntriples(X, strict=self.strict)
                self.parse_report_ = X.report
            index = build_index(X, label_predicates=self.label_predicates, max_terms=self.max_terms)
        self.index_ = index
        self.partition_ = index.partition
        self.hierarchy_ = build_hierarchy(index, self.partition_)
        self.report_ = profile(index, self.partition_, self.hierarchy_)
        return self

    def transform(self, X=None):
        """Return the report as a flat dict (``X`` is ignored)."""
        check_is_fitted(self, "report_")
        return self.report_.to_dict()

    def fit_transform(self, X, y=None):
        return self.fit(X).transform()
