"""Dictionary-encoded triple index and the class/instance/relation partition.

Terms are interned as their canonical N-Triples strings and numbered densely
from 0 in first-seen order.  Encoded triples are deduplicated and kept as
three parallel ``int64`` arrays sorted by (subject, predicate, object); a
permutation gives the object-major (OPS) view.
"""

from __future__ import annotations

import json
import struct
from array import array
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Optional

import numpy as np

from . import vocab
from .ntriples import NTriplesParser, Term, TripleRecord

__all__ = [
    "DatasetIndex",
    "TermPartition",
    "TermCapExceeded",
    "build_index",
    "partition_terms",
    "degree",
    "degree_array",
    "save_snapshot",
    "load_snapshot",
    "SNAPSHOT_MAGIC",
]

IN, OUT = "in", "out"
ENTITY_EDGES, ALL_ASSERTIONS = "entityEdges", "allAssertions"

SNAPSHOT_MAGIC = b"KGPROFIX"
SNAPSHOT_VERSION = 1


class TermCapExceeded(MemoryError):
    """The number of distinct terms exceeded the configured cap."""


class DatasetIndex:
    """Immutable, deduplicated triple store for one graph.

    Parameters
    ----------
    terms : list of str
        Canonical term keys; position is the term id.
    subjects, predicates, objects : ndarray
        Encoded triples, sorted by (subject, predicate, object), no duplicates.
    label_predicates : iterable of str
        Canonical IRI keys of the predicates holding entity labels.
    """

    def __init__(self, terms, subjects, predicates, objects, label_predicates=(vocab.RDFS_LABEL,)):
        self.terms = list(terms)
        self.ids = {t: i for i, t in enumerate(self.terms)}
        self.s = np.asarray(subjects, dtype=np.int64)
        self.p = np.asarray(predicates, dtype=np.int64)
        self.o = np.asarray(objects, dtype=np.int64)
        self.label_predicates = frozenset(label_predicates)
        for arr in (self.s, self.p, self.o):
            arr.flags.writeable = False

    @property
    def triple_count(self):
        return int(self.s.size)

    @property
    def term_count(self):
        return len(self.terms)

    def __len__(self):
        return self.triple_count

    def encode(self, key):
        """Id of a canonical term key (``KeyError`` if absent)."""
        return self.ids[key]

    def lookup(self, key):
        return self.ids.get(key)

    def decode(self, term_id):
        return self.terms[term_id]

    def term(self, term_id):
        return Term.from_key(self.terms[term_id])

    @cached_property
    def is_literal(self):
        return np.fromiter((t[0] == '"' for t in self.terms), dtype=bool, count=len(self.terms))

    @cached_property
    def is_reserved(self):
        """Mask of reserved vocabulary: RDF/RDFS/OWL/XSD IRIs and label predicates."""
        labels = self.label_predicates
        return np.fromiter(
            (vocab.is_reserved(t) or t in labels for t in self.terms), dtype=bool, count=len(self.terms)
        )

    @cached_property
    def ops_order(self):
        """Permutation listing triples sorted by (object, predicate, subject)."""
        return np.lexsort((self.s, self.p, self.o))

    def _subject_bounds(self, sid):
        return np.searchsorted(self.s, sid, "left"), np.searchsorted(self.s, sid, "right")

    def out_triples(self, sid):
        lo, hi = self._subject_bounds(sid)
        return [(int(self.s[i]), int(self.p[i]), int(self.o[i])) for i in range(lo, hi)]

    def in_triples(self, oid):
        order = self.ops_order
        o_sorted = self.o[order]
        lo, hi = np.searchsorted(o_sorted, oid, "left"), np.searchsorted(o_sorted, oid, "right")
        return [(int(self.s[i]), int(self.p[i]), int(self.o[i])) for i in order[lo:hi]]

    def triples_with_predicate(self, key):
        """(subject ids, object ids) of all triples using predicate ``key``."""
        pid = self.ids.get(key)
        if pid is None:
            empty = np.empty(0, dtype=np.int64)
            return empty, empty
        mask = self.p == pid
        return self.s[mask], self.o[mask]

    def iter_keys(self):
        terms = self.terms
        for s, p, o in zip(self.s.tolist(), self.p.tolist(), self.o.tolist()):
            yield terms[s], terms[p], terms[o]

    def iter_triples(self):
        for s, p, o in self.iter_keys():
            yield TripleRecord.from_keys(s, p, o)

    @cached_property
    def partition(self):
        return partition_terms(self)


def _as_key_stream(triples):
    if isinstance(triples, NTriplesParser):
        return triples.iter_keys()
    return (t.keys() if isinstance(t, TripleRecord) else tuple(t) for t in triples)


def build_index(
    triples: Iterable,
    label_predicates: Iterable[str] = (vocab.RDFS_LABEL,),
    max_terms: Optional[int] = None,
) -> DatasetIndex:
    """Encode and deduplicate a triple stream.

    ``triples`` may be an :class:`~kgprof.ntriples.NTriplesParser`, an
    iterable of :class:`TripleRecord`, or of canonical ``(s, p, o)`` key
    tuples.  Raises :class:`TermCapExceeded` when ``max_terms`` is exceeded.
    """
    ids: dict = {}
    terms: list = []
    buf = array("q")
    get = ids.get
    append = buf.append
    cap = max_terms if max_terms is not None else float("inf")
    for s, p, o in _as_key_stream(triples):
        for key in (s, p, o):
            i = get(key)
            if i is None:
                i = ids[key] = len(terms)
                if i >= cap:
                    raise TermCapExceeded(f"more than {max_terms} distinct terms")
                terms.append(key)
            append(i)
    del ids
    enc = np.frombuffer(buf, dtype=np.int64).reshape(-1, 3) if len(buf) else np.empty((0, 3), np.int64)
    s, p, o = _sort_unique(enc[:, 0], enc[:, 1], enc[:, 2])
    del buf, enc
    return DatasetIndex(terms, s, p, o, label_predicates)


def _sort_unique(s, p, o):
    if s.size == 0:
        return s.copy(), p.copy(), o.copy()
    order = np.lexsort((o, p, s))
    s, p, o = s[order], p[order], o[order]
    keep = np.ones(s.size, dtype=bool)
    keep[1:] = (s[1:] != s[:-1]) | (p[1:] != p[:-1]) | (o[1:] != o[:-1])
    return s[keep], p[keep], o[keep]


@dataclass(frozen=True)
class TermPartition:
    """Classes, instances and relations of one graph, as term-id sets."""

    classes: frozenset
    instances: frozenset
    object_relations: frozenset
    data_relations: frozenset
    declared_relations: frozenset = field(default_factory=frozenset)

    @property
    def dual_typed(self):
        return self.classes & self.instances

    @property
    def relations(self):
        return self.object_relations | self.data_relations


def partition_terms(index: DatasetIndex) -> TermPartition:
    """Split the terms of ``index`` into classes, instances and relations.

    Classes: terms typed ``owl:Class``/``rdfs:Class``, both ends of every
    ``rdfs:subClassOf`` edge, the meta-classes themselves when used as a type,
    and every non-reserved ``rdf:type`` object whose subject is not a class.
    Instances: subjects typed with a class other than a meta-class.  Terms
    that are both stay in both sets.
    """
    ids = index.ids
    reserved = index.is_reserved
    type_s, type_o = index.triples_with_predicate(vocab.RDF_TYPE)
    sub_s, sub_o = index.triples_with_predicate(vocab.RDFS_SUBCLASSOF)

    meta_ids = {ids[m] for m in vocab.META_CLASSES if m in ids}
    meta_arr = np.fromiter(meta_ids, dtype=np.int64, count=len(meta_ids))
    typed_meta = np.isin(type_o, meta_arr)
    base = set(type_s[typed_meta].tolist()) | set(sub_s.tolist()) | set(sub_o.tolist())
    classes = set(base)
    classes.update(type_o[typed_meta].tolist())

    base_arr = np.fromiter(base, dtype=np.int64, count=len(base))
    from_type = ~np.isin(type_s, base_arr) & ~reserved[type_o] & ~index.is_literal[type_o]
    classes.update(type_o[from_type].tolist())
    # owl:Thing lives in a reserved namespace but is a regular class.
    thing = ids.get(vocab.OWL_THING)
    if thing is not None and np.any(type_o == thing):
        classes.add(thing)

    class_arr = np.fromiter(classes, dtype=np.int64, count=len(classes))
    inst_mask = np.isin(type_o, class_arr) & ~typed_meta
    instances = set(type_s[inst_mask].tolist())

    pred_ok = ~reserved[index.p]
    lit = index.is_literal[index.o]
    object_relations = set(np.unique(index.p[pred_ok & ~lit]).tolist())
    data_relations = set(np.unique(index.p[pred_ok & lit]).tolist())
    declared = set()
    for decl, target in ((vocab.OWL_OBJECT_PROPERTY, object_relations), (vocab.OWL_DATATYPE_PROPERTY, data_relations)):
        did = ids.get(decl)
        if did is not None:
            props = [x for x in type_s[type_o == did].tolist() if not reserved[x]]
            target.update(props)
            declared.update(props)

    return TermPartition(
        classes=frozenset(classes),
        instances=frozenset(instances),
        object_relations=frozenset(object_relations),
        data_relations=frozenset(data_relations),
        declared_relations=frozenset(declared),
    )


def _id_mask(index, ids):
    mask = np.zeros(index.term_count, dtype=bool)
    if ids:
        mask[np.fromiter(ids, dtype=np.int64, count=len(ids))] = True
    return mask


def degree_array(index: DatasetIndex, direction: str, mode: str, partition: Optional[TermPartition] = None):
    """Degree of every term id under the given direction and edge population.

    ``entityEdges`` counts non-reserved triples between two instances;
    ``allAssertions`` counts every non-reserved triple at that position.
    """
    if direction not in (IN, OUT):
        raise ValueError(f"direction must be 'in' or 'out', got {direction!r}")
    if mode not in (ENTITY_EDGES, ALL_ASSERTIONS):
        raise ValueError(f"mode must be '{ENTITY_EDGES}' or '{ALL_ASSERTIONS}', got {mode!r}")
    partition = partition if partition is not None else index.partition
    mask = ~index.is_reserved[index.p]
    if mode == ENTITY_EDGES:
        inst = _id_mask(index, partition.instances)
        mask &= inst[index.s] & inst[index.o]
    ends = index.s if direction == OUT else index.o
    return np.bincount(ends[mask], minlength=index.term_count)


def degree(index: DatasetIndex, entity: int, direction: str = OUT, mode: str = ENTITY_EDGES, partition=None) -> int:
    """Degree of one instance.  Raises ``KeyError`` for ids that are not instances."""
    partition = partition if partition is not None else index.partition
    if entity not in partition.instances:
        raise KeyError(f"term id {entity} is not an instance")
    if direction not in (IN, OUT):
        raise ValueError(f"direction must be 'in' or 'out', got {direction!r}")
    ends = index.s if direction == OUT else index.o
    sel = (ends == entity) & ~index.is_reserved[index.p]
    if mode == ENTITY_EDGES:
        inst = _id_mask(index, partition.instances)
        sel &= inst[index.s] & inst[index.o]
    elif mode != ALL_ASSERTIONS:
        raise ValueError(f"unknown mode {mode!r}")
    return int(np.count_nonzero(sel))


# Snapshot layout (little endian):
#   8 bytes magic | u32 version | u64 header length | header JSON (utf-8)
#   | s, p, o as int64 arrays | term keys joined by "\n" (utf-8)
def save_snapshot(index: DatasetIndex, path) -> None:
    blob = "\n".join(index.terms).encode("utf-8")
    header = json.dumps(
        {"triples": index.triple_count, "terms": index.term_count, "termBytes": len(blob),
         "labelPredicates": sorted(index.label_predicates)}
    ).encode("utf-8")
    with open(path, "wb") as fh:
        fh.write(SNAPSHOT_MAGIC)
        fh.write(struct.pack("<IQ", SNAPSHOT_VERSION, len(header)))
        fh.write(header)
        for arr in (index.s, index.p, index.o):
            fh.write(np.ascontiguousarray(arr, dtype="<i8").tobytes())
        fh.write(blob)


def load_snapshot(path) -> DatasetIndex:
    with open(path, "rb") as fh:
        if fh.read(len(SNAPSHOT_MAGIC)) != SNAPSHOT_MAGIC:
            raise ValueError(f"{path}: not a kgprof index snapshot")
        version, hlen = struct.unpack("<IQ", fh.read(12))
        if version != SNAPSHOT_VERSION:
            raise ValueError(f"{path}: unsupported snapshot version {version}")
        header = json.loads(fh.read(hlen))
        n = header["triples"]
        arrays = [np.frombuffer(fh.read(8 * n), dtype="<i8").astype(np.int64) for _ in range(3)]
        blob = fh.read(header["termBytes"]).decode("utf-8")
    terms = blob.split("\n") if header["terms"] else []
    if len(terms) != header["terms"]:
        raise ValueError(f"{path}: truncated snapshot")
    return DatasetIndex(terms, *arrays, label_predicates=header["labelPredicates"])
