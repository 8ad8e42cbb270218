"""Acceptance suite: one test per criterion, each recording a pass/fail line.

The lines are printed at the end of the pytest run (see ``conftest.py``) and
when this file is executed directly.
"""

import json
import math
import os
import random
import subprocess
import sys
import textwrap
import time
from pathlib import Path

import numpy as np
import pytest
from scipy import sparse

import oracles
from conftest import METRIC_FIXTURES, MINI_MANIFEST
from kgprof import vocab
from kgprof.class_detail import class_members, class_stats
from kgprof.index import build_index
from kgprof.linker import DEFAULT_GRID, HeuristicConfig, match
from kgprof.overlap import OverlapEstimator, load_gold_links
from kgprof.profiler import KGProfiler, detect_expressivity
from kgprof.similarity import MEASURES
from kgprof.synth import planted_overlap, random_graph, write_ntriples_file

RESULTS = {}


def record(number, title, ok, detail):
    RESULTS[number] = f"criterion {number} [{'PASS' if ok else 'FAIL'}] {title}: {detail}"
    assert ok, RESULTS[number]


# --- 1 ------------------------------------------------------------------------


def _profile_mismatches(triples):
    est = KGProfiler().fit(triples)
    got = est.report_.to_dict()
    expected = oracles.brute_profile(triples)
    classes, instances, _, _ = oracles.partition(triples)
    expected["condensed_class_nodes"] = oracles.hierarchy_shape(triples, classes)[2]
    bad = []
    for key, value in expected.items():
        if isinstance(value, float):
            if not math.isclose(got[key], value, rel_tol=0, abs_tol=1e-9):
                bad.append(key)
        elif got[key] != value or type(got[key]) is not type(value):
            bad.append(key)
    missing = set(got) - set(expected)
    return est, bad, missing, classes, instances


def _class_mismatches(est, triples, classes, instances):
    members_map = oracles.class_member_map(triples)
    out_e, in_e, out_a = oracles.degrees(triples, instances)
    index, h = est.index_, est.hierarchy_
    bad = []
    for c in sorted(classes):
        members, unresolved = class_members(index, h, [c[1:-1]])
        detail = class_stats(index, members, c, est.partition_)
        walk = members_map[c]
        if unresolved or {index.decode(m) for m in members} != walk:
            bad.append((c, "members"))
            continue
        if not walk:
            if not detail.absent:
                bad.append((c, "absent"))
            continue
        exp_avg = sum(out_e[m] for m in walk) / len(walk)
        if (detail.instances != len(walk)
                or not math.isclose(detail.avg_degree, exp_avg, rel_tol=0, abs_tol=1e-9)
                or detail.median_in != oracles.lower_median([in_e[m] for m in walk])
                or detail.median_out != oracles.lower_median([out_a[m] for m in walk])):
            bad.append((c, "stats"))
    return bad, len(classes)


def test_criterion_1_metric_oracle_equivalence():
    fixtures = [(name, random_graph(**kw)) for name, kw in METRIC_FIXTURES]
    assert len(fixtures) >= 5 and all(len(t) <= 10_000 for _, t in fixtures)
    problems, n_classes, elapsed = [], 0, 0.0
    for name, triples in fixtures:
        start = time.perf_counter()
        est, bad, missing, classes, instances = _profile_mismatches(triples)
        elapsed += time.perf_counter() - start
        if bad or missing:
            problems.append((name, bad, sorted(missing)))
        start = time.perf_counter()
        cbad, n = _class_mismatches(est, triples, classes, instances)
        elapsed += time.perf_counter() - start
        n_classes += n
        if cbad:
            problems.append((name, cbad[:5]))
    ok = not problems and elapsed < 10
    record(1, "metric oracle equivalence", ok,
           f"{len(fixtures)} fixtures, {n_classes} classes, mismatches={problems or 'none'}, "
           f"runtime {elapsed:.2f} s (limit 10 s, includes the oracle walks)")


# --- 2 ------------------------------------------------------------------------


def test_criterion_2_estimator_correctness():
    start = time.perf_counter()
    # (a) noiseless labels, equality heuristic
    clean = planted_overlap(n_a=4000, n_b=5000, overlap=2500, noise=0.0, gold_fraction=0.5, seed=1)
    eq = OverlapEstimator(grid=[HeuristicConfig("equality")]).fit((clean.labels_a, clean.labels_b), clean.gold)
    a_ok = eq.predict() == 2500
    # (b) 10% per-character noise, full grid; two independent fixtures
    b_results = []
    c_worst = 0.0
    for seed in (2, 3):
        noisy = planted_overlap(n_a=4000, n_b=4000, overlap=3000, noise=0.1, gold_fraction=0.5, seed=seed)
        est = OverlapEstimator().fit((noisy.labels_a, noisy.labels_b), noisy.gold)
        b_results.append(est.predict())
        # (c) every per-heuristic estimate equals |F| * P / R, with P and R recomputed from the sets
        gold = noisy.gold
        covered = {a for a, _ in gold}
        for links, row in zip(est.links_, est.estimate_.per_heuristic):
            f = set(links.pairs)
            f_eval = {p for p in f if p[0] in covered}
            p = len(f_eval & gold) / len(f_eval)
            r = len(f & gold) / len(gold)
            expected = len(f) * p / r
            c_worst = max(c_worst, abs(row.estimate - expected) / expected)
    b_ok = all(abs(v - 3000) / 3000 <= 0.10 for v in b_results)
    c_ok = c_worst <= 4 * sys.float_info.epsilon
    elapsed = time.perf_counter() - start
    ok = a_ok and b_ok and c_ok and elapsed < 60
    record(2, "estimator correctness", ok,
           f"(a) equality estimate {eq.predict()} vs 2500; (b) noisy means "
           f"{', '.join(f'{v:.1f}' for v in b_results)} vs 3000 "
           f"(max error {max(abs(v - 3000) / 30 for v in b_results):.2f}%); "
           f"(c) max relative deviation {c_worst:.1e}; runtime {elapsed:.1f} s")


# --- 3 ------------------------------------------------------------------------

STRING_PAIRS = [
    ("kitten", "sitting"), ("martha", "marhta"), ("dwayne", "duane"), ("dixon", "dicksonx"),
    ("jones", "johnson"), ("abcvwxyz", "cabvwxyz"), ("crate", "trace"), ("", ""), ("a", ""), ("", "abc"),
    ("same", "same"), ("ab", "ba"), ("a", "a"), ("abc", "xyz"), ("new york", "york new"),
    ("new york city", "new york"), ("university of mannheim", "universität mannheim"),
    ("paul johnson", "johson paule"), ("barack obama", "obama barack hussein"),
    ("the the the", "the"), ("heiko paulheim", "heiko paulhiem"), ("berlin", "berlin germany"),
    ("aaaa", "aaab"), ("abcdefghij", "abcdefghji"), ("shackleford", "shackelford"),
    ("cunningham", "cunnigham"), ("washington", "wsahington"), ("müller", "muller"),
    ("x y z", "z y x"), ("hello world", "hallo welt"), ("café du monde", "cafe du monde"),
]


def test_criterion_3_similarity_reference():
    worst = {}
    for name, fn in MEASURES.items():
        ref = oracles.REFERENCE[name]
        worst[name] = max(abs(fn(a, b) - ref(a, b)) for a, b in STRING_PAIRS)
    expected_grid = ["equality"] + [f"{m}@{t}" for m in ("scaledLevenshtein", "jaccard") for t in
                                    (("0.8", "0.9", "1") if m == "scaledLevenshtein" else ("0.6", "0.8", "1"))]
    expected_grid += [f"{m}@{t}" for m in ("jaro", "jaroWinkler", "mongeElkan") for t in ("0.9", "0.95", "1")]
    grid_ok = [h.name for h in DEFAULT_GRID] == expected_grid and len(set(DEFAULT_GRID)) == 16
    ok = len(STRING_PAIRS) >= 20 and all(v <= 1e-9 for v in worst.values()) and grid_ok
    record(3, "similarity reference suite", ok,
           f"{len(STRING_PAIRS)} pairs x {len(MEASURES)} measures, max deviation "
           f"{max(worst.values()):.1e}; grid has {len(DEFAULT_GRID)} configurations"
           f"{'' if grid_ok else ' (unexpected grid)'}")


# --- 4 ------------------------------------------------------------------------


def _label_fixture(seed, n=2000, vocabulary=1500):
    rng = random.Random(seed)
    words = [f"t{i}" for i in range(vocabulary)]

    def label():
        return " ".join(rng.choice(words) for _ in range(rng.randint(1, 4)))

    la = {f"a{i}": {label() for _ in range(rng.randint(1, 2))} for i in range(n)}
    lb = {}
    for j in range(n):
        if j < n // 3:
            toks = sorted(la[f"a{j}"])[0].split()
            op = rng.random()
            if op < 0.3:
                toks.append(rng.choice(words))
            elif op < 0.6 and len(toks) > 1:
                toks.pop(rng.randrange(len(toks)))
            elif op < 0.8:
                toks[rng.randrange(len(toks))] = rng.choice(words)
            lb[f"b{j}"] = {" ".join(toks)}
        else:
            lb[f"b{j}"] = {label() for _ in range(rng.randint(1, 2))}
    return la, lb


def _sparse_all_pairs_jaccard(la, lb):
    """Best label-pair Jaccard of every entity pair with a nonzero score, via sparse products."""
    rows_a = [(e, lab) for e in sorted(la) for lab in sorted(la[e])]
    rows_b = [(e, lab) for e in sorted(lb) for lab in sorted(lb[e])]
    vocab_ = {}

    def incidence(rows):
        r, c = [], []
        for i, (_, lab) in enumerate(rows):
            for tok in set(lab.split()):
                r.append(i)
                c.append(vocab_.setdefault(tok, len(vocab_)))
        return r, c

    ra, ca = incidence(rows_a)
    rb, cb = incidence(rows_b)
    shape = len(vocab_)
    A = sparse.csr_matrix((np.ones(len(ra)), (ra, ca)), shape=(len(rows_a), shape))
    B = sparse.csr_matrix((np.ones(len(rb)), (rb, cb)), shape=(len(rows_b), shape))
    inter = (A @ B.T).tocoo()
    size_a = np.asarray(A.sum(axis=1)).ravel()
    size_b = np.asarray(B.sum(axis=1)).ravel()
    best = {}
    for i, j, v in zip(inter.row, inter.col, inter.data):
        union = size_a[i] + size_b[j] - v
        score = int(v) / int(union)
        key = (rows_a[i][0], rows_b[j][0])
        if score > best.get(key, 0.0):
            best[key] = score
    return best


def test_criterion_4_blocking_soundness():
    la, lb = _label_fixture(seed=17)
    best = _sparse_all_pairs_jaccard(la, lb)
    details = []
    ok = True
    for t in (0.6, 0.8, 1.0):
        blocked = match(HeuristicConfig("jaccard", t), la, lb, blocking=True).pairs
        truth = {pair for pair, s in best.items() if s >= t}
        missed, extra = len(truth - blocked), len(blocked - truth)
        ok &= missed == 0 and extra == 0 and len(truth) > 0
        details.append(f"@{t:g}: {len(truth)} pairs, missed {missed}, extra {extra}")
    record(4, "blocking soundness", ok, f"{len(la)}x{len(lb)} labels; " + "; ".join(details))


# --- 5 ------------------------------------------------------------------------


def _owl(name):
    return f"<{vocab.OWL}{name}>"


def _ex(name):
    return f"<http://ex.org/{name}>"


TYPE = vocab.RDF_TYPE
SUBPROP = vocab.RDFS_SUBPROPERTYOF
TYPED = f'"5"^^<{vocab.XSD}integer>'
TRANS = (_ex("partOf"), TYPE, _owl("TransitiveProperty"))
SUBP = (_ex("capital"), SUBPROP, _ex("city"))
ONEOF = (_ex("Colour"), _owl("oneOf"), _ex("list"))
INV = (_ex("hasPart"), _owl("inverseOf"), _ex("partOf"))
FUNC = (_ex("birthDate"), TYPE, _owl("FunctionalProperty"))
CHAIN = (_ex("uncle"), _owl("propertyChainAxiom"), _ex("chain"))
LIT = (_ex("x"), _ex("age"), TYPED)
PLAIN = (_ex("x"), _ex("name"), '"x"')

ONTOLOGIES = {
    "AL": [(_ex("x"), TYPE, _ex("C")), PLAIN],
    "ALC": [(_ex("C"), _owl("complementOf"), _ex("D"))],
    "ALD": [LIT],
    "SHD": [TRANS, SUBP, LIT],
    "SOD": [TRANS, ONEOF, LIT],
    "SO": [TRANS, ONEOF, PLAIN],
    "SH": [TRANS, SUBP],
    "SHOD": [TRANS, SUBP, ONEOF, (_ex("d"), TYPE, vocab.OWL_DATATYPE_PROPERTY)],
    "SHOFD": [TRANS, SUBP, ONEOF, FUNC, LIT],
    "SHOIF": [TRANS, SUBP, ONEOF, INV, FUNC],
    "SHOIFD": [TRANS, SUBP, ONEOF, INV, FUNC, LIT],
    "SROIF": [TRANS, SUBP, CHAIN, ONEOF, INV, FUNC],
    "ALCHIQ": [(_ex("C"), _owl("unionOf"), _ex("l")), SUBP, (_ex("p"), TYPE, _owl("SymmetricProperty")),
               (_ex("r"), _owl("minQualifiedCardinality"), _ex("n")), FUNC],
}


def test_criterion_5_expressivity_suite():
    wrong = {}
    for expected, triples in ONTOLOGIES.items():
        got = detect_expressivity(build_index(triples))
        if got != expected:
            wrong[expected] = got
    paper_shapes = {"SHOFD", "SHOIF", "SOD", "SO", "SHOIFD", "SROIF", "SHOD", "SH"}
    ok = not wrong and len(ONTOLOGIES) >= 8 and paper_shapes <= set(ONTOLOGIES)
    record(5, "expressivity suite", ok,
           f"{len(ONTOLOGIES) - len(wrong)}/{len(ONTOLOGIES)} ontologies match"
           f"{'' if not wrong else f', mismatches {wrong}'}")


# --- 6 ------------------------------------------------------------------------


def test_criterion_6_gold_closure(tmp_path):
    rng = random.Random(6)
    A = [f"http://a.org/e{i}" for i in range(60)]
    B = [f"http://b.org/e{i}" for i in range(60)]
    hubs = [f"http://wiki.org/h{i}" for i in range(25)]
    outside = [f"http://elsewhere.org/o{i}" for i in range(15)]
    statements = []
    for i in range(10):  # chains a - hub - x - b spread over files
        statements += [(A[i], hubs[i]), (hubs[i], outside[i]), (outside[i], B[i])]
    for i in range(10, 14):  # stars around one hub
        for node in (A[2 * i], A[2 * i + 1], B[2 * i], B[2 * i + 1], B[40 + i]):
            statements.append((hubs[i], node))
    for i in range(30, 40):  # direct and reversed direct links
        statements.append((A[i], B[i]) if i % 2 else (B[i], A[i]))
    pool = A + B + hubs + outside
    statements += [(rng.choice(pool), rng.choice(pool)) for _ in range(40)]  # random joins
    statements.append((A[50], A[51]))  # same-graph link joining components
    rng.shuffle(statements)

    files = []
    for k in range(4):
        chunk = statements[k::4]
        if k == 3:
            path = tmp_path / "links3.csv"
            path.write_text("left,right\n" + "".join(f"{x},{y}\n" for x, y in chunk))
        else:
            path = tmp_path / f"links{k}.nt"
            path.write_text("".join(f"<{x}> {vocab.OWL_SAMEAS} <{y}> .\n" for x, y in chunk))
        files.append(path)

    cls_a, cls_b = "<http://a.org/C>", "<http://b.org/C>"
    index_a = build_index([(f"<{x}>", TYPE, cls_a) for x in A])
    index_b = build_index([(f"<{x}>", TYPE, cls_b) for x in B])
    gold = load_gold_links(files, index_a, index_b)
    got = {(index_a.decode(a)[1:-1], index_b.decode(b)[1:-1]) for a, b in gold.pairs}
    expected = oracles.union_find_closure(statements, set(A), set(B))
    ok = got == expected and len(files) >= 3
    record(6, "gold-closure correctness", ok,
           f"{len(statements)} statements in {len(files)} files; {len(got)} pairs vs oracle {len(expected)}"
           f"{'' if got == expected else f', missing {len(expected - got)}, extra {len(got - expected)}'}")


# --- 7 ------------------------------------------------------------------------

_INGEST = textwrap.dedent("""
    import json, resource, sys, time
    from kgprof.index import build_index
    from kgprof.ntriples import parse_ntriples
    before = resource.getrusage(resource.RUSAGE_SELF).ru_maxrss
    start = time.perf_counter()
    index = build_index(parse_ntriples(sys.argv[1]))
    elapsed = time.perf_counter() - start
    peak = resource.getrusage(resource.RUSAGE_SELF).ru_maxrss
    print(json.dumps({"triples": index.triple_count, "terms": index.term_count, "seconds": elapsed,
                      "baseline_kb": before, "peak_kb": peak}))
""")


def _ingest(path):
    proc = subprocess.run([sys.executable, "-c", _INGEST, str(path)], capture_output=True, text=True, check=True)
    return json.loads(proc.stdout)


@pytest.mark.slow
def test_criterion_7_throughput_and_memory(tmp_path):
    runs = {}
    for terms in (100_000, 900_000):
        path = tmp_path / f"g{terms}.nt"
        write_ntriples_file(path, n_triples=1_000_000, n_terms=terms, seed=7)
        runs[terms] = _ingest(path)
        runs[terms]["bytes"] = os.path.getsize(path)
        path.unlink()
    small, large = runs[100_000], runs[900_000]
    grow = {t: (r["peak_kb"] - r["baseline_kb"]) / 1024 for t, r in runs.items()}
    size_ratio = large["bytes"] / small["bytes"]
    ok = (all(r["seconds"] <= 60 for r in runs.values())
          and small["triples"] >= 999_000 and large["terms"] >= 800_000
          # the files are the same size, so any memory difference comes from the term count
          and 0.9 <= size_ratio <= 1.1
          and grow[900_000] >= 2 * grow[100_000]
          and grow[100_000] * 1024 * 1024 < small["bytes"])
    record(7, "throughput and memory", ok,
           f"1M triples in {small['seconds']:.1f} s (100k terms) and {large['seconds']:.1f} s (900k terms); "
           f"index memory {grow[100_000]:.0f} MB vs {grow[900_000]:.0f} MB for files of "
           f"{small['bytes'] / 2**20:.0f} MB and {large['bytes'] / 2**20:.0f} MB")


# --- 8 ------------------------------------------------------------------------


def _snapshot(directory):
    return {p.relative_to(directory).as_posix(): p.read_bytes() for p in sorted(Path(directory).rglob("*"))
            if p.is_file()}


def _run_report(out, *extra):
    proc = subprocess.run([sys.executable, "-m", "kgprof", "report", str(MINI_MANIFEST), "--out", str(out), *extra],
                          capture_output=True, text=True)
    assert proc.returncode == 0, proc.stderr
    return _snapshot(out)


def test_criterion_8_end_to_end_determinism(tmp_path):
    first = _run_report(tmp_path / "one")
    second = _run_report(tmp_path / "two")
    parallel = _run_report(tmp_path / "three", "--jobs", "3")
    identical = first == second == parallel
    matrix = json.loads(first["matrix.json"])
    n = len(matrix["labels"])
    diag_ok = all(matrix["gainFraction"][i][i] == 0 and matrix["linkageCompleteness"][i][i] == 1 for i in range(n))
    square = all(len(matrix[k]) == n and all(len(row) == n for row in matrix[k])
                 for k in ("gainFraction", "linkageCompleteness"))
    defined = all(v is not None for k in ("gainFraction", "linkageCompleteness") for row in matrix[k] for v in row)
    violations = []
    sunbursts = [name for name in first if name.endswith("sunburst.json")]
    for name in sunbursts:
        doc = json.loads(first[name])
        violations += [(name, v) for v in oracles.sunburst_violations(doc["root"], doc["maxDepth"])]
    ok = identical and n == 8 and diag_ok and square and defined and not violations and len(sunbursts) == 8
    record(8, "end-to-end determinism", ok,
           f"{len(first)} files byte-identical across 3 runs: {identical}; {n}x{n} matrices, "
           f"diagonal ok: {diag_ok}, all cells defined: {defined}; "
           f"{len(sunbursts)} sunbursts, child-sum violations: {len(violations)}")


if __name__ == "__main__":
    code = pytest.main([__file__, "-q", "-p", "no:terminal"])
    results = sys.modules["test_acceptance"].RESULTS
    for number in sorted(results):
        print(results[number])
    sys.exit(code)
