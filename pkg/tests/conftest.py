import os
import sys
from pathlib import Path

import pytest

sys.path.insert(0, os.path.dirname(__file__))

from kgprof.synth import random_graph  # noqa: E402

ROOT = Path(__file__).resolve().parent.parent
MINI_MANIFEST = ROOT / "fixtures" / "mini" / "manifest.json"

# Fixture graphs for the metric oracles: (name, kwargs for random_graph)
METRIC_FIXTURES = [
    ("plain", dict(seed=1)),
    ("cyclic", dict(seed=2, n_classes=60, cycles=8)),
    ("multityped", dict(seed=3, multi_type=0.7, n_instances=400)),
    ("untyped-heavy", dict(seed=4, n_untyped=300, n_instances=150)),
    ("duplicates", dict(seed=5, duplicates=0.5)),
    ("thing-rooted", dict(seed=6, thing=True, n_classes=45)),
    ("large", dict(seed=7, n_classes=200, n_instances=1700, n_untyped=200)),
]


@pytest.fixture(params=METRIC_FIXTURES, ids=[name for name, _ in METRIC_FIXTURES])
def metric_triples(request):
    return random_graph(**request.param[1])


@pytest.fixture
def nt_file(tmp_path):
    def write(lines, name="g.nt"):
        path = tmp_path / name
        path.write_text("\n".join(lines) + "\n", encoding="utf-8")
        return path

    return write


def pytest_terminal_summary(terminalreporter):
    module = sys.modules.get("test_acceptance")
    results = getattr(module, "RESULTS", None)
    if results:
        terminalreporter.section("acceptance criteria")
        for number in sorted(results):
            terminalreporter.write_line(results[number])
