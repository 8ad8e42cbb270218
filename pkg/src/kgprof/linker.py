"""Candidate identity links between two graphs from instance labels."""

from __future__ import annotations

import csv
import io
import json
import logging
import random
import unicodedata
from collections import defaultdict
from dataclasses import dataclass, field

from sklearn.base import BaseEstimator

from . import vocab
from .index import DatasetIndex
from .ntriples import Term
from .similarity import get_measure
from .validation import check_is_fitted, check_label_map, check_threshold

__all__ = [
    "HeuristicConfig",
    "DEFAULT_GRID",
    "default_grid",
    "load_grid",
    "Labels",
    "normalize_label",
    "extract_labels",
    "generate_candidates",
    "CandidateLinkSet",
    "match",
    "LabelLinker",
]

log = logging.getLogger(__name__)

DEFAULT_BLOCK_CAP = 2_000_000


@dataclass(frozen=True, order=True)
class HeuristicConfig:
    measure: str
    threshold: float = 1.0

    def __post_init__(self):
        get_measure(self.measure)
        object.__setattr__(self, "threshold", check_threshold(self.threshold))

    @property
    def name(self):
        if self.measure == "equality":
            return "equality"
        return f"{self.measure}@{self.threshold:g}"

    def to_dict(self):
        return {"measure": self.measure, "threshold": self.threshold}


DEFAULT_GRID = (
    HeuristicConfig("equality", 1.0),
    *(HeuristicConfig("scaledLevenshtein", t) for t in (0.8, 0.9, 1.0)),
    *(HeuristicConfig("jaccard", t) for t in (0.6, 0.8, 1.0)),
    *(HeuristicConfig("jaro", t) for t in (0.9, 0.95, 1.0)),
    *(HeuristicConfig("jaroWinkler", t) for t in (0.9, 0.95, 1.0)),
    *(HeuristicConfig("mongeElkan", t) for t in (0.9, 0.95, 1.0)),
)


def default_grid():
    return list(DEFAULT_GRID)


def load_grid(source):
    """Read a grid file: a JSON list (or ``{"heuristics": [...]}``) of ``{"measure", "threshold"}``."""
    if hasattr(source, "read"):
        data = json.load(source)
    else:
        with open(source, encoding="utf-8") as fh:
            data = json.load(fh)
    if isinstance(data, dict):
        data = data["heuristics"]
    return [HeuristicConfig(h["measure"], h.get("threshold", 1.0)) for h in data]


def normalize_label(text):
    """NFC, lowercase, whitespace collapsed and stripped."""
    return " ".join(unicodedata.normalize("NFC", text).lower().split())


@dataclass
class Labels:
    """Normalized label sets of the labeled instances of one graph."""

    labels: dict
    unlabeled: int = 0
    iris: dict = field(default_factory=dict)

    def __len__(self):
        return len(self.labels)


def extract_labels(index: DatasetIndex, label_predicates=None, partition=None) -> Labels:
    """Collect literal labels of every instance.

    Instances without a label are excluded and counted in ``unlabeled``.
    """
    partition = partition if partition is not None else index.partition
    preds = label_predicates if label_predicates is not None else (index.label_predicates or {vocab.RDFS_LABEL})
    instances = partition.instances
    labels = defaultdict(set)
    terms = index.terms
    for pred in sorted(preds):
        subs, objs = index.triples_with_predicate(pred)
        for s, o in zip(subs.tolist(), objs.tolist()):
            if s in instances and terms[o][0] == '"':
                text = normalize_label(Term.from_key(terms[o]).lexical)
                if text:
                    labels[s].add(text)
    out = {s: frozenset(v) for s, v in labels.items()}
    iris = {s: terms[s] for s in instances}
    return Labels(out, unlabeled=len(instances) - len(out), iris=iris)


def _as_label_map(labels):
    return check_label_map(labels.labels if isinstance(labels, Labels) else labels)


def _token_index(labels):
    idx = defaultdict(set)
    for entity, values in labels.items():
        for value in values:
            for tok in value.split():
                idx[tok].add(entity)
    return idx


def _exact_index(labels):
    idx = defaultdict(set)
    for entity, values in labels.items():
        for value in values:
            idx[value].add(entity)
    return idx


def _sort_key(x):
    return (type(x).__name__, x)


def _blocked_pairs(a_tokens, b_tokens, a_exact, b_exact, block_cap, seed):
    pairs = set()
    for label, a_ents in a_exact.items():
        b_ents = b_exact.get(label)
        if b_ents:
            pairs.update((a, b) for a in a_ents for b in b_ents)
    for tok in sorted(a_tokens.keys() & b_tokens.keys()):
        a_ents, b_ents = a_tokens[tok], b_tokens[tok]
        if len(a_ents) * len(b_ents) <= block_cap:
            pairs.update((a, b) for a in a_ents for b in b_ents)
            continue
        log.warning("token block %r has %d x %d entities; sampling %d pairs", tok, len(a_ents), len(b_ents), block_cap)
        rng = random.Random(f"{seed}:{tok}")
        a_list = sorted(a_ents, key=_sort_key)
        b_list = sorted(b_ents, key=_sort_key)
        for _ in range(block_cap):
            pairs.add((rng.choice(a_list), rng.choice(b_list)))
    return pairs


def generate_candidates(labels_a, labels_b, blocking=True, block_cap=DEFAULT_BLOCK_CAP, seed=0):
    """Candidate entity pairs ``(a, b)`` worth scoring.

    With blocking, pairs share at least one normalized token or an entire
    label.  Token blocks larger than ``block_cap`` pairs are subsampled.
    Without blocking, every pair is a candidate.
    """
    la, lb = _as_label_map(labels_a), _as_label_map(labels_b)
    if not blocking:
        return {(a, b) for a in la for b in lb}
    return _blocked_pairs(_token_index(la), _token_index(lb), _exact_index(la), _exact_index(lb), block_cap, seed)


@dataclass
class CandidateLinkSet:
    heuristic: HeuristicConfig
    pairs: frozenset
    scores: dict = field(default_factory=dict, repr=False)

    @property
    def size_f(self):
        return len(self.pairs)

    def __len__(self):
        return len(self.pairs)

    def to_csv(self, iris_a=None, iris_b=None):
        """Rows ``entityA, entityB, score, measure, threshold`` in sorted order."""
        iris_a = iris_a or {}
        iris_b = iris_b or {}
        rows = sorted(
            (_strip(iris_a.get(a, a)), _strip(iris_b.get(b, b)), self.scores.get((a, b), float("nan")))
            for a, b in self.pairs
        )
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["entityA", "entityB", "score", "measure", "threshold"])
        for a, b, score in rows:
            writer.writerow([a, b, f"{score:.6f}", self.heuristic.measure, f"{self.heuristic.threshold:g}"])
        return buf.getvalue()


def _strip(key):
    key = str(key)
    return key[1:-1] if key.startswith("<") and key.endswith(">") else key


def _best_scores(fn, candidates, la, lb):
    cache = {}
    scores = {}
    for a, b in candidates:
        best = 0.0
        for x in la[a]:
            for y in lb[b]:
                k = (x, y)
                s = cache.get(k)
                if s is None:
                    s = cache[k] = fn(x, y)
                if s > best:
                    best = s
                    if best >= 1.0:
                        break
            if best >= 1.0:
                break
        scores[(a, b)] = best
    return scores


def _threshold(config, scores):
    kept = {pair: s for pair, s in scores.items() if s >= config.threshold}
    return CandidateLinkSet(config, frozenset(kept), kept)


def match(config, labels_a, labels_b, blocking=True, block_cap=DEFAULT_BLOCK_CAP, inner_measure=None, candidates=None):
    """Pairs whose best label-pair similarity under ``config`` reaches its threshold."""
    la, lb = _as_label_map(labels_a), _as_label_map(labels_b)
    if candidates is None:
        if config.measure == "equality":
            candidates = _blocked_pairs({}, {}, _exact_index(la), _exact_index(lb), block_cap, 0)
        else:
            candidates = generate_candidates(la, lb, blocking=blocking, block_cap=block_cap)
    fn = get_measure(config.measure, inner_measure)
    return _threshold(config, _best_scores(fn, candidates, la, lb))


class LabelLinker(BaseEstimator):
    """Label-based link discovery over a heuristic grid.

    ``fit`` indexes the target graph's labels; ``predict`` matches a source
    graph's labels against them and returns one :class:`CandidateLinkSet`
    per heuristic, in grid order.  Each measure is scored once per candidate
    pair and then thresholded for every grid entry using it.

    Parameters
    ----------
    grid : list of HeuristicConfig, optional
        Defaults to the sixteen standard configurations.
    blocking : bool
        Token blocking; ``False`` compares all pairs.
    block_cap : int
        Maximum pairs per token block before subsampling.
    inner_measure : str
        Token-level measure inside Monge-Elkan.
    """

    def __init__(self, grid=None, blocking=True, block_cap=DEFAULT_BLOCK_CAP, inner_measure="jaroWinkler", random_state=0):
        self.grid = grid
        self.blocking = blocking
        self.block_cap = block_cap
        self.inner_measure = inner_measure
        self.random_state = random_state

    def fit(self, X, y=None):
        self.labels_ = _as_label_map(X)
        self.tokens_ = _token_index(self.labels_)
        self.exact_ = _exact_index(self.labels_)
        self.grid_ = list(self.grid) if self.grid is not None else default_grid()
        return self

    def candidates(self, X):
        check_is_fitted(self, "labels_")
        la = _as_label_map(X)
        if not self.blocking:
            return {(a, b) for a in la for b in self.labels_}
        return _blocked_pairs(_token_index(la), self.tokens_, _exact_index(la), self.exact_, self.block_cap, self.random_state)

    def score(self, X, measure, candidates=None):
        """Best label-pair similarity of every candidate pair under ``measure``."""
        check_is_fitted(self, "labels_")
        la = _as_label_map(X)
        if candidates is None:
            candidates = self.candidates(la)
        fn = get_measure(measure, self.inner_measure)
        return _best_scores(fn, sorted(candidates, key=lambda p: (_sort_key(p[0]), _sort_key(p[1]))), la, self.labels_)

    def predict(self, X):
        check_is_fitted(self, "labels_")
        la = _as_label_map(X)
        candidates = self.candidates(la)
        by_measure = {}
        out = []
        for config in self.grid_:
            if config.measure not in by_measure:
                by_measure[config.measure] = self.score(la, config.measure, candidates)
            out.append(_threshold(config, by_measure[config.measure]))
        return out
