"""Overlap estimation between two graphs from heuristic links and an
incomplete set of known identity links."""

from __future__ import annotations

import csv
import json
import logging
import math
import os
from dataclasses import dataclass, field
from typing import Optional

from sklearn.base import BaseEstimator

from . import vocab
from .index import DatasetIndex
from .linker import CandidateLinkSet, LabelLinker
from .ntriples import parse_ntriples
from .validation import check_is_fitted, check_pairs

__all__ = [
    "GoldLinkSet",
    "read_sameas_statements",
    "closure_pairs",
    "load_gold_links",
    "evaluate_heuristic",
    "estimate_overlap",
    "HeuristicEstimate",
    "OverlapEstimate",
    "estimate_from_links",
    "PairStatistics",
    "pair_statistics",
    "OverlapEstimator",
]

log = logging.getLogger(__name__)

EXPLICIT, CLOSURE = "explicit", "closure"


def _iri_key(text):
    text = text.strip()
    return text if text.startswith("<") else "<" + text + ">"


def read_sameas_statements(path):
    """Identity statements of one link file as canonical key pairs.

    ``.csv``/``.tsv`` files hold two IRI columns (a header row is skipped
    when its cells are not IRIs); anything else is read as N-Triples and
    only ``owl:sameAs`` triples are kept.
    """
    name = os.fspath(path).lower()
    if name.endswith((".csv", ".tsv")):
        delim = "\t" if name.endswith(".tsv") else ","
        with open(path, newline="", encoding="utf-8") as fh:
            rows = [r for r in csv.reader(fh, delimiter=delim) if len(r) >= 2]
        if rows and not all(":" in c for c in rows[0][:2]):
            rows = rows[1:]
        return [(_iri_key(r[0]), _iri_key(r[1])) for r in rows]
    return [(s, o) for s, p, o in parse_ntriples(path).iter_keys() if p == vocab.OWL_SAMEAS and o[0] == "<"]


class _UnionFind:
    def __init__(self):
        self.parent = {}

    def find(self, x):
        parent = self.parent
        parent.setdefault(x, x)
        root = x
        while parent[root] != root:
            root = parent[root]
        while parent[x] != root:
            parent[x], x = root, parent[x]
        return root

    def union(self, a, b):
        ra, rb = self.find(a), self.find(b)
        if ra != rb:
            if rb < ra:
                ra, rb = rb, ra
            self.parent[rb] = ra


def closure_pairs(statements, side_a, side_b):
    """Pairs ``(a, b)`` with ``a`` in ``side_a`` and ``b`` in ``side_b`` connected
    through the transitive, symmetric closure of ``statements``.

    Returns ``(pairs, components_used, statements_unused)``.
    """
    uf = _UnionFind()
    for x, y in statements:
        uf.union(x, y)
    groups = {}
    for x in uf.parent:
        groups.setdefault(uf.find(x), []).append(x)
    pairs = set()
    useful_roots = set()
    for root, keys in groups.items():
        left = [k for k in keys if k in side_a]
        right = [k for k in keys if k in side_b]
        if left and right:
            useful_roots.add(root)
            pairs.update((a, b) for a in left for b in right if a != b)
    unused = sum(1 for x, _ in statements if uf.find(x) not in useful_roots)
    return pairs, len(useful_roots), unused


@dataclass
class GoldLinkSet:
    """Known links between graph A and graph B as ``(idA, idB)`` pairs."""

    pairs: frozenset
    provenance: dict = field(default_factory=dict)
    statements: int = 0
    statements_unused: int = 0

    def __len__(self):
        return len(self.pairs)

    def covered_a(self):
        return {a for a, _ in self.pairs}

    def to_dict(self):
        counts = {}
        for v in self.provenance.values():
            counts[v] = counts.get(v, 0) + 1
        return {"pairs": len(self.pairs), "statements": self.statements,
                "statementsUnused": self.statements_unused, "provenance": dict(sorted(counts.items()))}


def load_gold_links(link_files, index_a: DatasetIndex, index_b: DatasetIndex) -> GoldLinkSet:
    """Known A-B links from identity statements, closed under transitivity.

    Intermediate identifiers outside both graphs may join entities
    indirectly.  Statements that connect no instance of A to one of B are
    counted in ``statements_unused`` and otherwise ignored.
    """
    statements = []
    for path in link_files:
        statements.extend(read_sameas_statements(path))
    inst_a = {index_a.decode(i) for i in index_a.partition.instances}
    inst_b = {index_b.decode(i) for i in index_b.partition.instances}
    key_pairs, _, unused = closure_pairs(statements, inst_a, inst_b)
    direct = {frozenset(st) for st in statements}
    pairs = {}
    for a, b in key_pairs:
        pairs[(index_a.encode(a), index_b.encode(b))] = EXPLICIT if frozenset((a, b)) in direct else CLOSURE
    if unused:
        log.info("%d of %d identity statements link no A/B instance pair", unused, len(statements))
    return GoldLinkSet(frozenset(pairs), pairs, statements=len(statements), statements_unused=unused)


def _pair_set(links):
    if isinstance(links, (CandidateLinkSet, GoldLinkSet)):
        return set(links.pairs)
    return check_pairs(links)


def evaluate_heuristic(found, gold):
    """Precision and recall of ``found`` against the known links ``gold``.

    Precision is measured only on found pairs whose A-side entity has at
    least one known link.  Either value is ``None`` when its denominator is
    empty.  Returns ``(precision, recall, n_eval, n_correct)``.
    """
    f = _pair_set(found)
    g = _pair_set(gold)
    covered = {a for a, _ in g}
    f_eval = {pair for pair in f if pair[0] in covered}
    correct = len(f_eval & g)
    precision = correct / len(f_eval) if f_eval else None
    recall = len(f & g) / len(g) if g else None
    return precision, recall, len(f_eval), correct


def estimate_overlap(size_f, precision, recall):
    """|F| * P / R.  Raises ``ValueError`` when recall is missing or zero."""
    if recall is None or recall <= 0 or precision is None:
        raise ValueError("overlap estimate needs a defined precision and a positive recall")
    return size_f * precision / recall


@dataclass
class HeuristicEstimate:
    heuristic: str
    measure: str
    threshold: float
    size_f: int
    size_f_eval: int
    size_f_plus: int
    precision: Optional[float]
    recall: Optional[float]
    estimate: Optional[float]

    @property
    def excluded(self):
        return self.estimate is None

    def to_dict(self):
        return {
            "heuristic": self.heuristic, "measure": self.measure, "threshold": self.threshold,
            "F": self.size_f, "Feval": self.size_f_eval, "Fplus": self.size_f_plus,
            "precision": self.precision, "recall": self.recall, "estimate": self.estimate,
            "excluded": self.excluded,
        }


@dataclass
class OverlapEstimate:
    per_heuristic: list
    gold_size: int

    @property
    def included(self):
        return [h for h in self.per_heuristic if not h.excluded]

    @property
    def excluded(self):
        return [h.heuristic for h in self.per_heuristic if h.excluded]

    @property
    def aggregate(self):
        vals = [h.estimate for h in self.included]
        return sum(vals) / len(vals) if vals else None

    @property
    def coefficient_of_variation(self):
        vals = [h.estimate for h in self.included]
        if len(vals) < 2 or not self.aggregate:
            return None
        mean = self.aggregate
        return math.sqrt(sum((v - mean) ** 2 for v in vals) / len(vals)) / mean

    def to_dict(self):
        return {
            "goldLinks": self.gold_size,
            "perHeuristic": [h.to_dict() for h in self.per_heuristic],
            "aggregate": self.aggregate,
            "excluded": self.excluded,
        }

    def to_json(self, **extra):
        doc = self.to_dict()
        doc.update(extra)
        return json.dumps(doc, indent=2, sort_keys=True)


def estimate_from_links(link_sets, gold) -> OverlapEstimate:
    g = _pair_set(gold)
    rows = []
    for links in link_sets:
        precision, recall, n_eval, correct = evaluate_heuristic(links, g)
        try:
            est = estimate_overlap(links.size_f, precision, recall)
        except ValueError:
            est = None
        h = links.heuristic
        rows.append(HeuristicEstimate(h.name, h.measure, h.threshold, links.size_f, n_eval, correct,
                                      precision, recall, est))
    return OverlapEstimate(rows, len(g))


@dataclass
class PairStatistics:
    gain_fraction: float
    gain_fraction_larger: float
    linkage_completeness: Optional[float]
    overshoot: bool = False

    def to_dict(self):
        return {"gainFraction": self.gain_fraction, "gainFractionLarger": self.gain_fraction_larger,
                "linkageCompleteness": self.linkage_completeness, "overshoot": self.overshoot}


def pair_statistics(c_hat, size_a, size_b, gold_size) -> PairStatistics:
    """Share of the smaller graph missing from the larger, and how much of the
    estimated overlap the known links already cover."""
    if c_hat < 0 or size_a <= 0 or size_b <= 0:
        raise ValueError("pair_statistics needs a non-negative estimate and positive graph sizes")
    small, large = min(size_a, size_b), max(size_a, size_b)
    missing = small - c_hat
    overshoot = missing < 0
    if overshoot:
        log.warning("estimated overlap %.1f exceeds the smaller graph (%d entities); gain clamped to 0", c_hat, small)
    missing = max(0.0, missing)
    completeness = min(1.0, gold_size / c_hat) if c_hat > 0 else None
    return PairStatistics(missing / small, missing / large, completeness, overshoot)


class OverlapEstimator(BaseEstimator):
    """Estimate how many entities two graphs share.

    ``fit(X, y)`` takes ``X = (labels_a, labels_b)`` (label maps or
    :class:`~kgprof.linker.Labels`) and ``y`` the known links as
    ``(a, b)`` pairs or a :class:`GoldLinkSet`.

    Attributes
    ----------
    links_ : list of CandidateLinkSet
    estimate_ : OverlapEstimate
    """

    def __init__(self, grid=None, blocking=True, block_cap=None, inner_measure="jaroWinkler"):
        self.grid = grid
        self.blocking = blocking
        self.block_cap = block_cap
        self.inner_measure = inner_measure

    def _linker(self):
        kwargs = {} if self.block_cap is None else {"block_cap": self.block_cap}
        return LabelLinker(grid=self.grid, blocking=self.blocking, inner_measure=self.inner_measure, **kwargs)

    def fit(self, X, y):
        labels_a, labels_b = X
        linker = self._linker().fit(labels_b)
        self.links_ = linker.predict(labels_a)
        self.estimate_ = estimate_from_links(self.links_, y)
        return self

    def predict(self, X=None):
        """The averaged overlap estimate (``None`` if every heuristic was excluded)."""
        check_is_fitted(self, "estimate_")
        return self.estimate_.aggregate
