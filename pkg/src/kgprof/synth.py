"""Deterministic synthetic data: small graphs for metric checks, label sets
with a planted overlap, large N-Triples files for throughput runs, and the
bundled miniature multi-graph manifest."""

from __future__ import annotations

import json
import os
import random
import string
from dataclasses import dataclass
from pathlib import Path

from . import vocab

__all__ = [
    "random_graph",
    "PlantedOverlap",
    "planted_overlap",
    "add_char_noise",
    "write_ntriples_file",
    "write_mini_bundle",
    "MINI_GRAPHS",
]

EX = "http://example.org/"
_SYLLABLES = [c + v for c in "bcdfghjklmnprstvz" for v in "aeiou"]


def _word(rng, syllables=(2, 4)):
    return "".join(rng.choice(_SYLLABLES) for _ in range(rng.randint(*syllables)))


def _vocabulary(rng, size):
    words = set()
    while len(words) < size:
        words.add(_word(rng))
    return sorted(words)


def _lit(text, lang=None, datatype=None):
    body = '"' + text.replace("\\", "\\\\").replace('"', '\\"') + '"'
    if lang:
        return body + "@" + lang
    if datatype:
        return body + "^^<" + datatype + ">"
    return body


def random_graph(seed, n_classes=30, n_instances=200, n_untyped=20, cycles=2, multi_type=0.3,
                 edge_rate=1.5, literal_rate=2.0, duplicates=0.05, thing=False, ns=EX):
    """A small typed graph as a list of canonical key triples.

    Covers subclass cycles, multi-typed and untyped subjects, literals,
    inter-instance edges and duplicate triples.
    """
    rng = random.Random(seed)
    cls = [f"<{ns}C{i}>" for i in range(n_classes)]
    inst = [f"<{ns}e{i}>" for i in range(n_instances)]
    untyped = [f"<{ns}u{i}>" for i in range(n_untyped)]
    preds = [f"<{ns}p{i}>" for i in range(6)]
    dpreds = [f"<{ns}d{i}>" for i in range(3)]
    out = []
    for i, c in enumerate(cls):
        if rng.random() < 0.5:
            out.append((c, vocab.RDF_TYPE, vocab.OWL_CLASS))
        if i > 0:
            out.append((c, vocab.RDFS_SUBCLASSOF, cls[rng.randrange(i)]))
            if rng.random() < 0.2 and i > 1:
                out.append((c, vocab.RDFS_SUBCLASSOF, cls[rng.randrange(i)]))
    for _ in range(cycles):
        if n_classes > 2:
            a = rng.randrange(1, n_classes)
            b = rng.randrange(a)
            out.append((cls[b], vocab.RDFS_SUBCLASSOF, cls[a]))
    if thing:
        out.append((cls[0], vocab.RDFS_SUBCLASSOF, vocab.OWL_THING))
        orphan = f"<{ns}Orphan>"
        out.append((orphan, vocab.RDF_TYPE, vocab.OWL_CLASS))
        out.append((inst[0], vocab.RDF_TYPE, orphan))
    for e in inst:
        out.append((e, vocab.RDF_TYPE, rng.choice(cls)))
        while rng.random() < multi_type:
            out.append((e, vocab.RDF_TYPE, rng.choice(cls)))
        for _ in range(int(rng.expovariate(1 / edge_rate))):
            out.append((e, rng.choice(preds), rng.choice(inst + untyped + cls[:2])))
        for _ in range(int(rng.expovariate(1 / literal_rate))):
            out.append((e, rng.choice(dpreds), _lit(_word(rng), datatype=vocab.XSD + "string")))
        if rng.random() < 0.7:
            out.append((e, vocab.RDFS_LABEL, _lit(_word(rng) + " " + _word(rng), lang="en")))
    for u in untyped:
        out.append((u, rng.choice(preds), rng.choice(inst)))
        out.append((u, dpreds[0], _lit(_word(rng))))
    if cls:
        # a dual-typed term: a class that is also typed with a regular class
        out.append((cls[-1], vocab.RDF_TYPE, cls[0]))
    n_dup = int(len(out) * duplicates)
    out.extend(rng.choice(out) for _ in range(n_dup))
    rng.shuffle(out)
    return out


def add_char_noise(text, rate, rng):
    """Replace each letter with probability ``rate`` by a different random letter."""
    chars = list(text)
    for i, ch in enumerate(chars):
        if ch != " " and rng.random() < rate:
            chars[i] = rng.choice([c for c in string.ascii_lowercase if c != ch])
    return "".join(chars)


@dataclass
class PlantedOverlap:
    labels_a: dict
    labels_b: dict
    truth: set
    gold: set


def planted_overlap(n_a=5000, n_b=5000, overlap=3000, noise=0.0, gold_fraction=0.5, seed=0,
                    vocabulary=6000, tokens=(2, 3)):
    """Two label maps sharing ``overlap`` entities.

    Entity ``i`` of A matches entity ``i`` of B for ``i < overlap``; B's
    copy of the label gets per-letter noise at ``noise``.  All clean labels
    are distinct.  ``gold`` is a random ``gold_fraction`` of the true pairs.
    """
    if overlap > min(n_a, n_b):
        raise ValueError("overlap cannot exceed either graph size")
    rng = random.Random(seed)
    words = _vocabulary(rng, vocabulary)
    total = n_a + n_b - overlap
    seen = set()
    clean = []
    while len(clean) < total:
        label = " ".join(rng.choice(words) for _ in range(rng.randint(*tokens)))
        if label not in seen:
            seen.add(label)
            clean.append(label)
    labels_a = {f"a{i}": frozenset({clean[i]}) for i in range(n_a)}
    labels_b = {}
    for j in range(n_b):
        if j < overlap:
            text = add_char_noise(clean[j], noise, rng) if noise else clean[j]
        else:
            text = clean[n_a + j - overlap]
        labels_b[f"b{j}"] = frozenset({text})
    truth = {(f"a{i}", f"b{i}") for i in range(overlap)}
    gold = set(rng.sample(sorted(truth), round(gold_fraction * overlap)))
    return PlantedOverlap(labels_a, labels_b, truth, gold)


def write_ntriples_file(path, n_triples, n_terms, seed=0):
    """Write ``n_triples`` distinct-ish triples over roughly ``n_terms`` distinct terms."""
    rng = random.Random(seed)
    n_pred = 50
    n_nodes = max(1, n_terms - n_pred)
    with open(path, "w", encoding="utf-8") as fh:
        write = fh.write
        for i in range(n_triples):
            s = i % n_nodes
            o = rng.randrange(n_nodes)
            p = rng.randrange(n_pred)
            write(f"<{EX}n{s}> <{EX}p{p}> <{EX}n{o}> .\n")


# name -> (instances, classes, relations, OWL constructs used)
MINI_GRAPHS = {
    "dbpedia": (420, 40, 12, ("transitive", "subprop", "oneOf", "functional", "typed")),
    "yago": (520, 90, 8, ("transitive", "subprop", "oneOf", "inverse", "functional")),
    "wikidata": (700, 120, 16, ("transitive", "oneOf", "typed")),
    "babelnet": (480, 150, 4, ("transitive", "oneOf")),
    "cyc": (160, 60, 10, ("transitive", "subprop", "oneOf", "inverse", "functional", "typed")),
    "nell": (300, 30, 9, ("transitive", "chain", "oneOf", "inverse", "functional")),
    "caligraph": (560, 80, 10, ("transitive", "subprop", "oneOf", "typed")),
    "voldemort": (120, 25, 7, ("transitive", "subprop")),
}


def _constructs(ns, names):
    o = lambda n: vocab.iri(vocab.OWL + n)  # noqa: E731
    out = []
    p0, p1 = f"<{ns}p0>", f"<{ns}p1>"
    if "transitive" in names:
        out.append((p0, vocab.RDF_TYPE, o("TransitiveProperty")))
    if "subprop" in names:
        out.append((p1, vocab.RDFS_SUBPROPERTYOF, p0))
    if "chain" in names:
        out.append((p1, o("propertyChainAxiom"), "_:chain1"))
    if "oneOf" in names:
        out.append((f"<{ns}Colors>", o("oneOf"), "_:list1"))
    if "inverse" in names:
        out.append((p1, o("inverseOf"), p0))
    if "functional" in names:
        out.append((f"<{ns}p2>", vocab.RDF_TYPE, o("FunctionalProperty")))
    return out


def write_mini_bundle(directory, seed=7, universe=1200):
    """Write eight small graphs, their identity links and a manifest.

    The graphs draw entities from a shared universe with slightly perturbed
    labels.  Most pairs get direct ``owl:sameAs`` links for part of their
    common entities; ``nell`` is linked only through Wikipedia-style hub
    IRIs to test closure.  Returns the manifest path.
    """
    rng = random.Random(seed)
    root = Path(directory)
    (root / "graphs").mkdir(parents=True, exist_ok=True)
    (root / "links").mkdir(parents=True, exist_ok=True)
    words = _vocabulary(rng, 3000)
    names = []
    while len(names) < universe:
        label = " ".join(rng.choice(words) for _ in range(rng.randint(2, 3)))
        if label not in names:
            names.append(label)
    members = {}
    manifest = {"graphs": {}, "links": [], "classMapping": "classes.json"}
    for gi, (g, (n_inst, n_cls, n_rel, constructs)) in enumerate(MINI_GRAPHS.items()):
        ns = f"http://{g}.example.org/"
        picked = sorted(rng.sample(range(universe), n_inst))
        members[g] = picked
        local = [f"<{ns}resource/E{u}>" for u in picked]
        triples = random_graph(seed * 100 + gi, n_classes=n_cls, n_instances=0, n_untyped=0, cycles=1,
                               duplicates=0.0, thing=False, ns=ns + "ontology/")
        cls = [f"<{ns}ontology/C{i}>" for i in range(n_cls)]
        preds = [f"<{ns}p{i}>" for i in range(n_rel)]
        triples += _constructs(ns, constructs)
        for e, u in zip(local, picked):
            # shared entities keep their size rank across graphs: big classes stay big
            triples.append((e, vocab.RDF_TYPE, cls[min(n_cls - 1, int(rng.paretovariate(1.2)) - 1)]))
            if rng.random() < 0.2:
                triples.append((e, vocab.RDF_TYPE, rng.choice(cls)))
            label = names[u] if rng.random() < 0.8 else add_char_noise(names[u], 0.08, rng)
            triples.append((e, vocab.RDFS_LABEL, _lit(label, lang="en")))
            for _ in range(rng.randint(0, 4)):
                triples.append((e, rng.choice(preds), rng.choice(local)))
            for _ in range(rng.randint(0, 3)):
                value = str(rng.randint(1, 9999))
                typed = "typed" in constructs
                triples.append((e, f"<{ns}value>", _lit(value, datatype=vocab.XSD + "integer" if typed else None)))
        triples.sort()
        with open(root / "graphs" / f"{g}.nt", "w", encoding="utf-8") as fh:
            for s, p, o in triples:
                fh.write(f"{s} {p} {o} .\n")
        manifest["graphs"][g] = {"dump": f"graphs/{g}.nt"}
    labels = list(MINI_GRAPHS)
    for i, a in enumerate(labels):
        for b in labels[i + 1 :]:
            common = sorted(set(members[a]) & set(members[b]))
            keep = rng.uniform(0.3, 0.9)
            linked = [u for u in common if rng.random() < keep]
            path = root / "links" / f"{a}--{b}.nt"
            with open(path, "w", encoding="utf-8") as fh:
                for u in linked:
                    ea = f"<http://{a}.example.org/resource/E{u}>"
                    eb = f"<http://{b}.example.org/resource/E{u}>"
                    if "nell" in (a, b):
                        hub = f"<http://en.wikipedia.org/wiki/E{u}>"
                        fh.write(f"{ea} <{vocab.OWL}sameAs> {hub} .\n{hub} <{vocab.OWL}sameAs> {eb} .\n")
                    else:
                        fh.write(f"{ea} <{vocab.OWL}sameAs> {eb} .\n")
            manifest["links"].append({"pair": [a, b], "files": [f"links/{a}--{b}.nt"]})
    mapping = {"classes": [
        {"name": f"Class {k}", "graphs": {g: [f"http://{g}.example.org/ontology/C{k}"] for g in labels}}
        for k in range(3)
    ] + [{"name": "Missing", "graphs": {}}]}
    with open(root / "classes.json", "w", encoding="utf-8") as fh:
        json.dump(mapping, fh, indent=2, sort_keys=True)
        fh.write("\n")
    path = root / "manifest.json"
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(manifest, fh, indent=2, sort_keys=True)
        fh.write("\n")
    return os.fspath(path)
