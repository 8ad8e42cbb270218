import logging
import math

import pytest
from hypothesis import given, settings, strategies as st

import oracles
from kgprof import vocab
from kgprof.index import build_index
from kgprof.linker import CandidateLinkSet, HeuristicConfig
from kgprof.overlap import (
    CLOSURE,
    EXPLICIT,
    OverlapEstimator,
    closure_pairs,
    estimate_from_links,
    estimate_overlap,
    evaluate_heuristic,
    load_gold_links,
    pair_statistics,
    read_sameas_statements,
)
from kgprof.synth import planted_overlap
from kgprof.validation import NotFittedError

SAME = vocab.OWL_SAMEAS


def links(pairs, measure="jaro", threshold=0.9):
    return CandidateLinkSet(HeuristicConfig(measure, threshold), frozenset(pairs))


def test_perfect_heuristic():
    g = {(i, i) for i in range(5)}
    assert evaluate_heuristic(g, g)[:2] == (1.0, 1.0)


def test_half_precision_example():
    gold = {(f"a{i}", f"b{i}") for i in range(10)}
    found = {(f"a{i}", f"b{i}") for i in range(4)} | {(f"a{i}", f"x{i}") for i in range(4, 8)}
    found |= {("uncovered", "b0")}  # not gold-covered, ignored by precision
    p, r, n_eval, correct = evaluate_heuristic(found, gold)
    assert (p, r, n_eval, correct) == (0.5, 0.4, 8, 4)


def test_precision_undefined_when_no_covered_entity():
    p, r, _, _ = evaluate_heuristic({("z", "y")}, {("a", "b")})
    assert p is None and r == 0.0
    est = estimate_from_links([links({("z", "y")})], {("a", "b")})
    assert est.excluded == ["jaro@0.9"] and est.aggregate is None


def test_estimate_arithmetic():
    assert estimate_overlap(1000, 0.8, 0.4) == pytest.approx(2000)
    assert estimate_overlap(17, 1.0, 1.0) == 17
    with pytest.raises(ValueError):
        estimate_overlap(10, 1.0, 0.0)


@settings(max_examples=100, deadline=None)
@given(st.sets(st.tuples(st.integers(0, 30), st.integers(0, 30)), max_size=60),
       st.sets(st.tuples(st.integers(0, 30), st.integers(0, 30)), min_size=1, max_size=40))
def test_estimate_self_consistency(found, gold):
    est = estimate_from_links([links(found)], gold).per_heuristic[0]
    covered = {a for a, _ in gold}
    f_eval = {pair for pair in found if pair[0] in covered}
    assert est.size_f_eval == len(f_eval)
    assert est.size_f_plus == len(f_eval & gold)
    if est.excluded:
        assert not f_eval or not found & gold
    else:
        assert est.estimate == pytest.approx(len(found) * est.precision / est.recall, rel=1e-12)
        assert est.estimate == pytest.approx(len(found) * est.size_f_plus / (len(f_eval) * est.recall), rel=1e-12)


def test_pair_statistics_examples():
    s = pair_statistics(80, 100, 300, 40)
    assert s.gain_fraction == pytest.approx(0.2)
    assert s.gain_fraction_larger == pytest.approx(20 / 300)
    assert s.linkage_completeness == pytest.approx(0.5)
    assert not s.overshoot


def test_pair_statistics_overshoot(caplog):
    with caplog.at_level(logging.WARNING):
        s = pair_statistics(150, 100, 300, 300)
    assert s.gain_fraction == 0.0 and s.overshoot and s.linkage_completeness == 1.0
    assert "exceeds" in caplog.text
    assert pair_statistics(0, 10, 10, 0).linkage_completeness is None


def test_closure_through_external_identifier():
    pairs, used, unused = closure_pairs([("a", "x"), ("x", "b"), ("p", "q")], {"a"}, {"b"})
    assert pairs == {("a", "b")} and used == 1 and unused == 1


def test_closure_matches_oracle():
    import random

    rng = random.Random(4)
    nodes = [f"n{i}" for i in range(200)]
    statements = [(rng.choice(nodes), rng.choice(nodes)) for _ in range(150)]
    side_a, side_b = set(nodes[:80]), set(nodes[60:150])
    pairs, _, _ = closure_pairs(statements, side_a, side_b)
    assert pairs == oracles.union_find_closure(statements, side_a, side_b)


def _graph(prefix, n):
    return build_index([(f"<http://{prefix}.org/e{i}>", vocab.RDF_TYPE, f"<http://{prefix}.org/C>") for i in range(n)])


def test_load_gold_links_across_files(tmp_path):
    index_a, index_b = _graph("a", 5), _graph("b", 5)
    (tmp_path / "one.nt").write_text(
        f"<http://a.org/e0> {SAME} <http://wiki.org/X> .\n"
        f"<http://a.org/e1> {SAME} <http://b.org/e1> .\n"
        f"<http://a.org/e2> <http://ex.org/other> <http://b.org/e2> .\n")
    (tmp_path / "two.csv").write_text("source,target\nhttp://wiki.org/X,http://b.org/e0\n")
    (tmp_path / "three.tsv").write_text("http://nowhere.org/1\thttp://nowhere.org/2\n")
    (tmp_path / "empty.nt").write_text("")
    files = [tmp_path / n for n in ("one.nt", "two.csv", "three.tsv", "empty.nt")]
    gold = load_gold_links(files, index_a, index_b)
    e = lambda idx, g, i: idx.encode(f"<http://{g}.org/e{i}>")  # noqa: E731
    assert set(gold.pairs) == {(e(index_a, "a", 0), e(index_b, "b", 0)), (e(index_a, "a", 1), e(index_b, "b", 1))}
    assert gold.provenance[(e(index_a, "a", 1), e(index_b, "b", 1))] == EXPLICIT
    assert gold.provenance[(e(index_a, "a", 0), e(index_b, "b", 0))] == CLOSURE
    assert gold.statements == 4 and gold.statements_unused == 1
    assert load_gold_links([tmp_path / "empty.nt"], index_a, index_b).pairs == frozenset()


def test_read_sameas_skips_header(tmp_path):
    path = tmp_path / "l.csv"
    path.write_text("a,b\n<http://x/1>,http://y/1\n")
    assert read_sameas_statements(path) == [("<http://x/1>", "<http://y/1>")]


def test_estimator_noiseless_equality_exact():
    p = planted_overlap(n_a=2000, n_b=2500, overlap=1200, seed=5)
    est = OverlapEstimator(grid=[HeuristicConfig("equality")]).fit((p.labels_a, p.labels_b), p.gold)
    assert est.predict() == 1200.0


def test_estimator_complete_gold():
    p = planted_overlap(n_a=2000, n_b=2000, overlap=700, seed=6, gold_fraction=1.0)
    est = OverlapEstimator(grid=[HeuristicConfig("equality")]).fit((p.labels_a, p.labels_b), p.truth)
    assert est.predict() == 700.0


def test_estimator_stability_on_planted_fixture():
    p = planted_overlap(n_a=2000, n_b=2000, overlap=500, noise=0.1, seed=8)
    est = OverlapEstimator().fit((p.labels_a, p.labels_b), p.gold)
    assert abs(est.predict() - 500) / 500 <= 0.10
    assert est.estimate_.coefficient_of_variation < 0.25
    assert est.get_params()["blocking"] is True


def test_estimator_requires_fit():
    with pytest.raises(NotFittedError):
        OverlapEstimator().predict()


def test_cv_definition():
    est = estimate_from_links([links({(1, 1), (2, 3)}), links({(1, 1)}, threshold=1.0)], {(1, 1), (2, 2)})
    vals = [h.estimate for h in est.per_heuristic]
    mean = sum(vals) / 2
    assert est.coefficient_of_variation == pytest.approx(math.sqrt(sum((v - mean) ** 2 for v in vals) / 2) / mean)
