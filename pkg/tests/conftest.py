import sys

import numpy as np
import pytest

from likecent.graph import Graph, is_connected
from likecent.likedness import RateMatrix


def path_graph(n):
    return Graph(n, [(i, i + 1) for i in range(n - 1)])


def complete_graph(n):
    return Graph(n, [(i, j) for i in range(n) for j in range(i + 1, n)])


def star_graph(leaves):
    return Graph(leaves + 1, [(0, k) for k in range(1, leaves + 1)])


def cycle_graph(n):
    return Graph(n, [(i, (i + 1) % n) for i in range(n)])


def random_connected_graph(rng, n, p=0.4):
    """Erdős-Rényi draws, retried until connected."""
    while True:
        edges = [(i, j) for i in range(n) for j in range(i + 1, n) if rng.random() < p]
        g = Graph(n, edges)
        if is_connected(g):
            return g


def exponential_rates(graph, rng, mean=2.0):
    return RateMatrix(graph, rng.exponential(mean, size=2 * graph.m))


@pytest.fixture
def rng():
    return np.random.default_rng(20240601)


@pytest.fixture
def k2():
    return complete_graph(2)


@pytest.fixture
def k2_rates(k2):
    # R[0,1] = 3: vertex 1 likes vertex 0 at rate 3
    return RateMatrix.from_entries(k2, {(0, 1): 3.0, (1, 0): 5.0})


def pytest_terminal_summary(terminalreporter):
    module = sys.modules.get("test_acceptance")
    lines = getattr(module, "LINES", None)
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in lines:
            terminalreporter.write_line(line)
