"""``kgprof`` command-line tool.

Exit status: 0 on success, 1 on usage errors, 2 on data errors.
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys

from . import vocab
from .class_detail import default_mappings, load_mappings
from .index import TermCapExceeded
from .linker import default_grid, load_grid
from .ntriples import ParseError
from .pipeline import (
    Manifest,
    OutputWriter,
    analyse_graph,
    dumps,
    estimate_pair,
    graph_label,
    run_matrix,
    run_report,
)

log = logging.getLogger("kgprof")

EXIT_OK, EXIT_USAGE, EXIT_DATA = 0, 1, 2


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise UsageError(message)


def _label_predicates(values):
    if not values:
        return (vocab.RDFS_LABEL,)
    return tuple(v if v.startswith("<") else vocab.iri(v) for v in values)


def build_parser():
    parser = _Parser(prog="kgprof", description="Profile knowledge graphs and estimate their overlap.")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--out", default=os.environ.get("KGPROF_OUT", "./kgprof-out"),
                        help="output directory, or '-' for standard output (default: $KGPROF_OUT or ./kgprof-out)")
    common.add_argument("--strict", action="store_true", help="abort on the first malformed input line")
    common.add_argument("--jobs", type=int, default=1, help="parallel workers for per-graph and per-pair work")
    common.add_argument("-v", "--verbose", action="store_true")
    label_opt = argparse.ArgumentParser(add_help=False)
    label_opt.add_argument("--label-predicate", action="append", metavar="IRI",
                           help="label predicate IRI (repeatable; default rdfs:label)")
    grid_opt = argparse.ArgumentParser(add_help=False)
    grid_opt.add_argument("--grid", help="JSON file with the heuristic grid")
    grid_opt.add_argument("--no-blocking", action="store_true", help="compare all label pairs")

    sub = parser.add_subparsers(dest="command", parser_class=_Parser)
    p = sub.add_parser("profile", parents=[common, label_opt], help="graph-level metrics")
    p.add_argument("dump")
    p.add_argument("--snapshot", nargs="?", const="", default=None,
                   help="reuse or create a binary index snapshot (default path: <dump>.kgidx)")

    p = sub.add_parser("classes", parents=[common, label_opt], help="per-class detail statistics")
    p.add_argument("dump")
    p.add_argument("--mapping", help="class mapping JSON (default: bundled mapping)")
    p.add_argument("--graph", help="graph label used to look up the mapping (default: file stem)")
    p.add_argument("--strict-mapping", action="store_true", help="fail on unknown class IRIs")

    p = sub.add_parser("sunburst", parents=[common, label_opt], help="class-size hierarchy data")
    p.add_argument("dump")
    p.add_argument("--depth", type=int, default=3)
    p.add_argument("--top-k", type=int, default=12)

    p = sub.add_parser("link", parents=[common, label_opt, grid_opt], help="heuristic link discovery")
    p.add_argument("dump_a")
    p.add_argument("dump_b")

    p = sub.add_parser("estimate", parents=[common, label_opt, grid_opt], help="overlap estimate for one pair")
    p.add_argument("dump_a")
    p.add_argument("dump_b")
    p.add_argument("--gold", nargs="+", required=True, help="identity link files (N-Triples or CSV)")

    p = sub.add_parser("matrix", parents=[common, grid_opt], help="pairwise heatmaps for a manifest")
    p.add_argument("manifest")

    p = sub.add_parser("report", parents=[common, grid_opt], help="all outputs for a manifest")
    p.add_argument("manifest")
    p.add_argument("--depth", type=int, default=3)
    p.add_argument("--top-k", type=int, default=12)
    p.add_argument("--strict-mapping", action="store_true")
    return parser


def _emit(writer, name, text):
    """Write ``text`` as ``name`` and echo it to stdout."""
    if writer.to_stdout:
        sys.stdout.write(text)
    else:
        writer.write(name, text)
        sys.stdout.write(text)


def _graph(path, args):
    return analyse_graph(graph_label(path), path, _label_predicates(getattr(args, "label_predicate", None)),
                         strict=args.strict, snapshot=getattr(args, "snapshot_path", None))


def _grid(args):
    return load_grid(args.grid) if args.grid else default_grid()


def cmd_profile(args):
    if args.snapshot is not None:
        args.snapshot_path = args.snapshot or args.dump + ".kgidx"
    g = _graph(args.dump, args)
    writer = OutputWriter(args.out)
    _emit(writer, f"{g.label}.profile.json", dumps(g.profile_doc()))


def cmd_classes(args):
    g = _graph(args.dump, args)
    mappings = load_mappings(args.mapping) if args.mapping else default_mappings()
    g.label = args.graph or g.label
    doc, table = g.classes_doc(mappings, strict=args.strict_mapping)
    writer = OutputWriter(args.out)
    if not writer.to_stdout:
        writer.write(f"{g.label}.classes.csv", table)
    _emit(writer, f"{g.label}.classes.json", dumps(doc))


def cmd_sunburst(args):
    if args.depth < 0 or args.top_k < 0:
        raise UsageError("--depth and --top-k must be non-negative")
    g = _graph(args.dump, args)
    writer = OutputWriter(args.out)
    _emit(writer, f"{g.label}.sunburst.json", dumps(g.sunburst_doc(args.depth, args.top_k)))


def cmd_link(args):
    from .linker import LabelLinker

    ga, gb = _graph(args.dump_a, args), _graph(args.dump_b, args)
    linker = LabelLinker(grid=_grid(args), blocking=not args.no_blocking).fit(gb.labels)
    writer = OutputWriter(args.out)
    summary = {"graphA": ga.label, "graphB": gb.label, "labeledA": len(ga.labels), "labeledB": len(gb.labels),
               "unlabeledA": ga.labels.unlabeled, "unlabeledB": gb.labels.unlabeled, "heuristics": []}
    iris_a = {i: ga.index.decode(i) for i in ga.labels.labels}
    iris_b = {i: gb.index.decode(i) for i in gb.labels.labels}
    for links in linker.predict(ga.labels):
        name = f"{ga.label}--{gb.label}.links/{links.heuristic.name}.csv"
        writer.write(name, links.to_csv(iris_a, iris_b))
        summary["heuristics"].append({**links.heuristic.to_dict(), "F": links.size_f, "file": name})
    writer.write(f"{ga.label}--{gb.label}.links.json", dumps(summary))
    writer.flush()
    if not writer.to_stdout:
        sys.stdout.write(dumps(summary))


def cmd_estimate(args):
    ga, gb = _graph(args.dump_a, args), _graph(args.dump_b, args)
    doc, _, _ = estimate_pair(ga, gb, args.gold, grid=_grid(args), blocking=not args.no_blocking)
    writer = OutputWriter(args.out)
    _emit(writer, f"{ga.label}--{gb.label}.estimate.json", dumps(doc))


def cmd_matrix(args):
    manifest = Manifest.load(args.manifest)
    writer = OutputWriter(args.out)
    run_matrix(manifest, writer, grid=load_grid(args.grid) if args.grid else None,
               blocking=not args.no_blocking, strict=args.strict, jobs=args.jobs)
    writer.flush()


def cmd_report(args):
    if args.depth < 0 or args.top_k < 0:
        raise UsageError("--depth and --top-k must be non-negative")
    manifest = Manifest.load(args.manifest)
    writer = OutputWriter(args.out)
    run_report(manifest, writer, grid=load_grid(args.grid) if args.grid else None,
               blocking=not args.no_blocking, strict=args.strict, strict_mapping=args.strict_mapping,
               depth=args.depth, top_k=args.top_k, jobs=args.jobs)
    writer.flush()


COMMANDS = {
    "profile": cmd_profile,
    "classes": cmd_classes,
    "sunburst": cmd_sunburst,
    "link": cmd_link,
    "estimate": cmd_estimate,
    "matrix": cmd_matrix,
    "report": cmd_report,
}


def run(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if args.command is None:
            parser.print_help(sys.stderr)
            return EXIT_USAGE
        logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                            format="kgprof: %(levelname)s: %(message)s", stream=sys.stderr)
        COMMANDS[args.command](args)
    except UsageError as exc:
        print(f"kgprof: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (ParseError, TermCapExceeded, KeyError, OSError, ValueError, json.JSONDecodeError) as exc:
        print(f"kgprof: data error: {exc}", file=sys.stderr)
        return EXIT_DATA
    return EXIT_OK


def main():
    sys.exit(run())


if __name__ == "__main__":
    main()
