import sys
from pathlib import Path

import pytest

from c2hourglass.graph_core import Multigraph

DATA = Path(__file__).parent / "data"


def complete(n):
    return Multigraph.from_pairs(n, [(i, j) for i in range(n) for j in range(i + 1, n)])


def wheel(n):
    spokes = [(0, i) for i in range(1, n + 1)]
    rim = [(i, i % n + 1) for i in range(1, n + 1)]
    return Multigraph.from_pairs(n + 1, spokes + rim)


def prism():
    return Multigraph.from_pairs(6, [(0, 1), (1, 2), (2, 0), (3, 4), (4, 5), (5, 3), (0, 3), (1, 4), (2, 5)])


def triangle():
    return Multigraph.from_pairs(3, [(0, 1), (1, 2), (2, 0)], labels=["a", "b", "c"])


def corpus(with_decompletions=True):
    base = {"K4": complete(4), "K5": complete(5), "prism": prism(), "W4": wheel(4), "W5": wheel(5)}
    out = dict(base)
    if with_decompletions:
        for name, g in base.items():
            for v in range(g.vertex_count):
                h = g.delete_vertex(v)
                if h.is_connected() and len(h.edges) >= 3:
                    out[f"{name}-v{v}"] = h
    return out


@pytest.fixture
def data_dir():
    return DATA


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    if mod is None or not mod.RESULTS:
        return
    terminalreporter.section("acceptance")
    for n in range(1, 8):
        terminalreporter.write_line(mod.RESULTS.get(n, f"criterion {n}: NOT RUN"))
