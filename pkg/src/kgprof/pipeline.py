"""Orchestration behind the command-line tool: loading graphs, running the
per-graph and per-pair analyses, and writing deterministic outputs."""

from __future__ import annotations

import csv
import io
import json
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

from . import vocab
from .class_detail import class_table, default_mappings, load_mappings, table_to_csv
from .hierarchy import build_hierarchy
from .index import build_index, load_snapshot, save_snapshot
from .linker import Labels, LabelLinker, extract_labels, load_grid
from .ntriples import parse_ntriples
from .overlap import estimate_from_links, load_gold_links, pair_statistics
from .profiler import ROW_NAMES, profile
from .viz import PairMatrix, build_sunburst, render_heatmap

__all__ = [
    "GraphSpec",
    "Manifest",
    "GraphResult",
    "OutputWriter",
    "dumps",
    "graph_label",
    "load_graph",
    "analyse_graph",
    "estimate_pair",
    "run_matrix",
    "run_report",
]


def dumps(doc):
    return json.dumps(doc, indent=2, sort_keys=True, ensure_ascii=False) + "\n"


def graph_label(path):
    name = Path(path).name
    for suffix in (".gz", ".nt", ".ntriples"):
        if name.endswith(suffix):
            name = name[: -len(suffix)]
    return name


@dataclass
class GraphSpec:
    label: str
    dump: str
    label_predicates: tuple = (vocab.RDFS_LABEL,)
    snapshot: str = None


@dataclass
class Manifest:
    graphs: list
    links: dict = field(default_factory=dict)
    class_mapping: str = None
    grid: str = None

    @classmethod
    def load(cls, path):
        base = Path(path).resolve().parent
        with open(path, encoding="utf-8") as fh:
            data = json.load(fh)

        def rel(p):
            return os.fspath(base / p) if p is not None else None

        graphs = []
        for label, spec in data["graphs"].items():
            preds = tuple(vocab.iri(p) if not p.startswith("<") else p
                          for p in spec.get("labelPredicates", [vocab.RDFS + "label"]))
            graphs.append(GraphSpec(label, rel(spec["dump"]), preds, rel(spec.get("snapshot"))))
        links = {}
        for entry in data.get("links", []):
            a, b = entry["pair"]
            links[(a, b)] = [rel(f) for f in entry["files"]]
        return cls(graphs, links, rel(data.get("classMapping")), rel(data.get("grid")))


class OutputWriter:
    """Writes named outputs below a directory, or bundles them for stdout when ``out == "-"``."""

    def __init__(self, out):
        self.out = out
        self.bundle = {}
        if out != "-":
            Path(out).mkdir(parents=True, exist_ok=True)

    @property
    def to_stdout(self):
        return self.out == "-"

    def write(self, name, content):
        if isinstance(content, bytes):
            content = content.decode("utf-8")
        if self.to_stdout:
            self.bundle[name] = content
            return
        path = Path(self.out) / name
        path.parent.mkdir(parents=True, exist_ok=True)
        with open(path, "w", encoding="utf-8", newline="") as fh:
            fh.write(content)

    def flush(self, stream=None):
        if self.to_stdout and self.bundle:
            (stream or sys.stdout).write(dumps(dict(sorted(self.bundle.items()))))


def load_graph(dump, label_predicates=(vocab.RDFS_LABEL,), strict=False, snapshot=None, max_terms=None):
    """Build (or restore from ``snapshot``) the index of one dump; returns ``(index, parse_report)``."""
    if snapshot and os.path.exists(snapshot):
        return load_snapshot(snapshot), None
    parser = parse_ntriples(dump, strict=strict)
    index = build_index(parser, label_predicates=label_predicates, max_terms=max_terms)
    if snapshot:
        save_snapshot(index, snapshot)
    return index, parser.report


@dataclass
class GraphResult:
    label: str
    index: object
    partition: object
    hierarchy: object
    report: object
    parse_report: object
    labels: Labels

    def profile_doc(self):
        doc = {"graph": self.label, "rowNames": ROW_NAMES, "metrics": self.report.to_dict(),
               "unlabeledInstances": self.labels.unlabeled}
        if self.parse_report is not None:
            doc["parse"] = self.parse_report.to_dict()
        return doc

    def classes_doc(self, mappings, strict=False):
        rows = class_table(self.index, self.hierarchy, mappings, self.label, strict=strict)
        return {"graph": self.label, "classes": [r.to_dict() for r in rows]}, table_to_csv(rows)

    def sunburst_doc(self, depth=3, top_k=12):
        tree = build_sunburst(self.hierarchy, depth, top_k, total_instances=len(self.partition.instances))
        return {"graph": self.label, "maxDepth": depth, "topK": top_k, "root": tree.to_dict()}


def analyse_graph(label, dump, label_predicates=(vocab.RDFS_LABEL,), strict=False, snapshot=None):
    index, parse_report = load_graph(dump, label_predicates, strict, snapshot)
    partition = index.partition
    hierarchy = build_hierarchy(index, partition)
    report = profile(index, partition, hierarchy)
    labels = extract_labels(index, label_predicates, partition)
    return GraphResult(label, index, partition, hierarchy, report, parse_report, labels)


def estimate_pair(ga: GraphResult, gb: GraphResult, gold_files, grid=None, blocking=True):
    """Heuristic links, their calibration against the known links, and the pair statistics."""
    gold = load_gold_links(gold_files, ga.index, gb.index)
    linker = LabelLinker(grid=grid, blocking=blocking).fit(gb.labels)
    links = linker.predict(ga.labels)
    est = estimate_from_links(links, gold)
    doc = {"graphA": ga.label, "graphB": gb.label, "instancesA": ga.report.instances,
           "instancesB": gb.report.instances, "gold": gold.to_dict()}
    doc.update(est.to_dict())
    stats = None
    if est.aggregate is not None and ga.report.instances and gb.report.instances:
        stats = pair_statistics(est.aggregate, ga.report.instances, gb.report.instances, len(gold))
    doc["pairStatistics"] = stats.to_dict() if stats else None
    return doc, links, stats


def _map(fn, items, jobs):
    if jobs and jobs > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            return list(pool.map(fn, items))
    return [fn(x) for x in items]


def _analyse_all(manifest, strict, jobs):
    return _map(lambda g: analyse_graph(g.label, g.dump, g.label_predicates, strict, g.snapshot),
                manifest.graphs, jobs)


def _pairs(manifest, results, grid, blocking, jobs):
    by_label = {r.label: r for r in results}
    pairs = [(a, b, files) for (a, b), files in sorted(manifest.links.items())]
    docs = _map(lambda t: estimate_pair(by_label[t[0]], by_label[t[1]], t[2], grid, blocking), pairs, jobs)
    return {(a, b): doc for (a, b, _), doc in zip(pairs, docs)}


def _matrices(labels, pair_docs):
    gain = PairMatrix.empty(labels, 0.0)
    completeness = PairMatrix.empty(labels, 1.0)
    pos = {label: i for i, label in enumerate(labels)}
    for (a, b), (_, _, stats) in pair_docs.items():
        if stats is None:
            continue
        i, j = pos[a], pos[b]
        gain[i, j] = gain[j, i] = stats.gain_fraction
        completeness[i, j] = completeness[j, i] = stats.linkage_completeness
    return gain, completeness


def _write_matrices(writer, gain, completeness):
    for name, matrix, title in (("gain", gain, "Share of the smaller graph missing from the larger"),
                                ("completeness", completeness, "Known links relative to estimated overlap")):
        writer.write(f"matrix.{name}.csv", render_heatmap(matrix, "csv"))
        writer.write(f"matrix.{name}.svg", render_heatmap(matrix, "svg", title=title))
    writer.write("matrix.json", dumps({"labels": gain.labels, "gainFraction": gain.cells,
                                       "linkageCompleteness": completeness.cells}))


def _pair_name(a, b):
    return f"{a}--{b}"


def _manifest_grid(manifest, grid):
    if grid is None and manifest.grid:
        return load_grid(manifest.grid)
    return grid


def run_matrix(manifest, writer, grid=None, blocking=True, strict=False, jobs=1):
    grid = _manifest_grid(manifest, grid)
    results = _analyse_all(manifest, strict, jobs)
    pair_docs = _pairs(manifest, results, grid, blocking, jobs)
    for (a, b), (doc, _, _) in pair_docs.items():
        writer.write(f"pairs/{_pair_name(a, b)}.estimate.json", dumps(doc))
    gain, completeness = _matrices([r.label for r in results], pair_docs)
    _write_matrices(writer, gain, completeness)
    return gain, completeness


def table1_csv(results):
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow([""] + [r.label for r in results])
    for key, row_name in ROW_NAMES.items():
        values = []
        for r in results:
            v = getattr(r.report, key)
            values.append(f"{v:.2f}" if isinstance(v, float) else v)
        w.writerow([row_name] + values)
    return buf.getvalue()


def run_report(manifest, writer, grid=None, blocking=True, strict=False, strict_mapping=False,
               depth=3, top_k=12, jobs=1):
    """Everything: per-graph profile, class table, sunburst; per-pair estimates; matrices; overview."""
    grid = _manifest_grid(manifest, grid)
    mappings = load_mappings(manifest.class_mapping) if manifest.class_mapping else default_mappings()
    results = _analyse_all(manifest, strict, jobs)
    for r in results:
        writer.write(f"graphs/{r.label}/profile.json", dumps(r.profile_doc()))
        doc, table = r.classes_doc(mappings, strict=strict_mapping)
        writer.write(f"graphs/{r.label}/classes.json", dumps(doc))
        writer.write(f"graphs/{r.label}/classes.csv", table)
        writer.write(f"graphs/{r.label}/sunburst.json", dumps(r.sunburst_doc(depth, top_k)))
    writer.write("table1.csv", table1_csv(results))
    pair_docs = _pairs(manifest, results, grid, blocking, jobs)
    edges = []
    for (a, b), (doc, _, _) in pair_docs.items():
        writer.write(f"pairs/{_pair_name(a, b)}.estimate.json", dumps(doc))
        edges.append({"pair": [a, b], "goldLinks": doc["gold"]["pairs"], "estimatedOverlap": doc["aggregate"]})
    overview = {"nodes": [{"graph": r.label, "instances": r.report.instances,
                           "avgLinkingDegree": r.report.avg_linking_degree} for r in results],
                "edges": edges}
    writer.write("overview.json", dumps(overview))
    gain, completeness = _matrices([r.label for r in results], pair_docs)
    _write_matrices(writer, gain, completeness)
    return results, pair_docs
