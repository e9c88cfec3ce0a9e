"""Structural centralities used as regressors for neighbor desirability."""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from typing import Literal

import numpy as np

from likecent.errors import ConvergenceError, DegenerateGraphError
from likecent.graph import Graph, is_connected

Measure = Literal["degree", "betweenness", "closeness", "eigenvector"]
MEASURES: tuple[Measure, ...] = ("degree", "betweenness", "closeness", "eigenvector")


@dataclass(frozen=True, eq=False)
class CentralityScores:
    measure: Measure
    values: np.ndarray


def degree_centrality(graph: Graph) -> CentralityScores:
    return CentralityScores("degree", graph.degree.astype(float))


def _bfs_distances(graph: Graph, source: int) -> np.ndarray:
    dist = np.full(graph.n, -1, dtype=np.int64)
    dist[source] = 0
    queue = deque([source])
    while queue:
        u = queue.popleft()
        for v in graph.neighbors[u]:
            if dist[v] < 0:
                dist[v] = dist[u] + 1
                queue.append(v)
    return dist


def betweenness_centrality(graph: Graph) -> CentralityScores:
    """Unnormalized shortest-path betweenness (Brandes), each unordered pair once.

    Endpoints are not credited. Dependencies are accumulated from every source
    and halved, since each pair is then seen from both ends.
    """
    cb = np.zeros(graph.n)
    for s in range(graph.n):
        order = []
        preds: list[list[int]] = [[] for _ in range(graph.n)]
        paths = np.zeros(graph.n)
        paths[s] = 1.0
        dist = np.full(graph.n, -1, dtype=np.int64)
        dist[s] = 0
        queue = deque([s])
        while queue:
            v = queue.popleft()
            order.append(v)
            for w in graph.neighbors[v]:
                if dist[w] < 0:
                    dist[w] = dist[v] + 1
                    queue.append(w)
                if dist[w] == dist[v] + 1:
                    paths[w] += paths[v]
                    preds[w].append(v)
        delta = np.zeros(graph.n)
        for w in reversed(order):
            for v in preds[w]:
                delta[v] += paths[v] / paths[w] * (1.0 + delta[w])
            if w != s:
                cb[w] += delta[w]
    return CentralityScores("betweenness", cb / 2.0)


def closeness_centrality(graph: Graph) -> CentralityScores:
    """``(N - 1) / sum_j d(i, j)`` from BFS distances."""
    if not is_connected(graph):
        raise DegenerateGraphError("closeness centrality needs a connected graph")
    if graph.n == 1:
        return CentralityScores("closeness", np.zeros(1))
    vals = np.array([(graph.n - 1) / _bfs_distances(graph, i).sum() for i in range(graph.n)])
    return CentralityScores("closeness", vals)


def eigenvector_centrality(graph: Graph, tol: float = 1e-12, max_iter: int = 10_000) -> CentralityScores:
    """Perron vector of the adjacency matrix, scaled to unit maximum.

    Power iteration runs on ``A + I`` (same eigenvectors, no period-2
    oscillation on bipartite graphs).
    """
    if not is_connected(graph):
        raise DegenerateGraphError("eigenvector centrality needs a connected graph")
    A = graph.adjacency
    x = np.ones(graph.n)
    change = np.inf
    for it in range(max_iter):
        y = A @ x + x
        y /= y.max()
        change = float(np.max(np.abs(y - x)))
        x = y
        if change <= tol:
            return CentralityScores("eigenvector", x)
    raise ConvergenceError("eigenvector centrality did not converge", change, max_iter)


def all_centralities(graph: Graph) -> dict[str, CentralityScores]:
    return {
        "degree": degree_centrality(graph),
        "betweenness": betweenness_centrality(graph),
        "closeness": closeness_centrality(graph),
        "eigenvector": eigenvector_centrality(graph),
    }
