from __future__ import annotations

import random
import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from dqscore.projection import AnalyticGraph  # noqa: E402

_acceptance: list[tuple[str, str]] = []


def pytest_runtest_logreport(report):
    if "test_acceptance.py" in report.nodeid and report.when == "call":
        _acceptance.append((report.nodeid.split("::")[-1], report.outcome.upper()))
    elif "test_acceptance.py" in report.nodeid and report.when == "setup" and report.outcome != "passed":
        _acceptance.append((report.nodeid.split("::")[-1], report.outcome.upper()))


def pytest_terminal_summary(terminalreporter):
    if not _acceptance:
        return
    terminalreporter.section("acceptance criteria")
    for name, outcome in _acceptance:
        terminalreporter.write_line(f"{'PASS' if outcome == 'PASSED' else 'FAIL'}  {name}")


def random_digraph(rng: random.Random, max_vertices: int, min_vertices: int = 1) -> AnalyticGraph:
    n = rng.randint(min_vertices, max_vertices)
    vs = [f"http://x/v{i}" for i in range(n)]
    p = rng.random()
    return AnalyticGraph.from_edges(vs, [(a, b) for a in vs for b in vs if a != b and rng.random() < p])


@pytest.fixture
def rng():
    return random.Random(20140618)
