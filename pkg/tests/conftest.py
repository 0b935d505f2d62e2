from __future__ import annotations

import random
import sys
from itertools import combinations

import pytest

from knowtopo.graph import WeightedGraph


def complete(n, w=1):
    return WeightedGraph.from_index_edges(n, [(u, v, w) for u, v in combinations(range(n), 2)])


def cycle(n, w=1):
    return WeightedGraph.from_index_edges(n, [(i, (i + 1) % n, w) for i in range(n)])


def octahedron(w=1):
    opposite = {(0, 1), (2, 3), (4, 5)}
    return WeightedGraph.from_index_edges(
        6, [(u, v, w) for u, v in combinations(range(6), 2) if (u, v) not in opposite]
    )


def disjoint_union(*graphs):
    edges, offset = [], 0
    for g in graphs:
        edges += [(u + offset, v + offset, w) for u, v, w in g.edges]
        offset += g.node_count
    return WeightedGraph.from_index_edges(offset, edges)


def random_graph(rng: random.Random, n_max=10, w_max=5, n_min=1):
    n = rng.randint(n_min, n_max)
    p = rng.random()
    edges = [(u, v, rng.randint(1, w_max)) for u, v in combinations(range(n), 2) if rng.random() < p]
    return WeightedGraph.from_index_edges(n, edges)


@pytest.fixture
def rng():
    return random.Random(20240601)


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    results = getattr(mod, "RESULTS", None)
    if not results:
        return
    terminalreporter.section("acceptance criteria")
    for number, ok, text in sorted(results):
        terminalreporter.write_line(f"criterion {number:2d}: {'PASS' if ok else 'FAIL'}  {text}")
