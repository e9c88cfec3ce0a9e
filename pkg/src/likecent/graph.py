"""Simple undirected graphs: validation, edge-list I/O and Barabási-Albert growth.

Vertex ids are 0-based everywhere (vertex ``k`` here is vertex ``k+1`` in
1-based notation).
"""

from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass
from functools import cached_property
from typing import Iterable

import numpy as np
import scipy.sparse as sp

from likecent.errors import ParameterError, ParseError


@dataclass(frozen=True, eq=False)
class Graph:
    """Immutable undirected graph on vertices ``0..n-1``.

    Edges are stored once each as ``(min, max)`` and sorted, so ``(0, 1)`` and
    ``(1, 0)`` describe the same edge. Self-loops and out-of-range ids are kept
    as given so that :func:`validate` can report them.
    """

    n: int
    edges: tuple[tuple[int, int], ...]

    def __init__(self, n: int, edges: Iterable[tuple[int, int]] = ()):
        canon = sorted({(min(int(u), int(v)), max(int(u), int(v))) for u, v in edges})
        object.__setattr__(self, "n", int(n))
        object.__setattr__(self, "edges", tuple(canon))

    def __eq__(self, other):
        if not isinstance(other, Graph):
            return NotImplemented
        return self.n == other.n and self.edges == other.edges

    def __hash__(self):
        return hash((self.n, self.edges))

    def __repr__(self):
        return f"Graph(n={self.n}, m={len(self.edges)})"

    @property
    def m(self) -> int:
        return len(self.edges)

    @cached_property
    def degree(self) -> np.ndarray:
        deg = np.zeros(self.n, dtype=np.int64)
        for u, v in self.edges:
            if u == v:
                continue
            if 0 <= u < self.n:
                deg[u] += 1
            if 0 <= v < self.n:
                deg[v] += 1
        deg.flags.writeable = False
        return deg

    @cached_property
    def neighbors(self) -> tuple[tuple[int, ...], ...]:
        adj: list[list[int]] = [[] for _ in range(self.n)]
        for u, v in self.edges:
            if u != v and 0 <= u < self.n and 0 <= v < self.n:
                adj[u].append(v)
                adj[v].append(u)
        return tuple(tuple(sorted(a)) for a in adj)

    @cached_property
    def arcs(self) -> tuple[np.ndarray, np.ndarray]:
        """Ordered pairs ``(i, j)`` for every edge in both directions, row-major.

        The order matches the CSR layout of :attr:`adjacency`, so per-arc arrays
        (such as rates) line up with ``adjacency.indices``.
        """
        heads = np.repeat(np.arange(self.n), [len(a) for a in self.neighbors])
        tails = np.fromiter((j for a in self.neighbors for j in a), dtype=np.int64, count=heads.size)
        heads.flags.writeable = False
        tails.flags.writeable = False
        return heads, tails

    @cached_property
    def adjacency(self) -> sp.csr_matrix:
        heads, tails = self.arcs
        mat = sp.csr_matrix(
            (np.ones(heads.size), tails, np.concatenate(([0], np.cumsum(self.degree)))),
            shape=(self.n, self.n),
        )
        return mat

    def has_edge(self, u: int, v: int) -> bool:
        return v in self.neighbors[u] if 0 <= u < self.n else False

    def relabel(self, perm) -> Graph:
        """Return the graph with vertex ``k`` renamed to ``perm[k]``."""
        perm = list(perm)
        return Graph(self.n, ((perm[u], perm[v]) for u, v in self.edges))


def validate(graph: Graph) -> list[str]:
    """List every violated graph invariant; an empty list means the graph is valid."""
    problems = []
    seen = set()
    for u, v in graph.edges:
        if u == v:
            problems.append(f"self-loop at vertex {u}")
        for x in (u, v):
            if not 0 <= x < graph.n:
                problems.append(f"edge ({u}, {v}): vertex {x} outside 0..{graph.n - 1}")
        if u > v:
            problems.append(f"edge ({u}, {v}) not stored as (min, max)")
        key = (min(u, v), max(u, v))
        if key in seen:
            problems.append(f"duplicate edge ({u}, {v})")
        seen.add(key)
    counted = np.zeros(graph.n, dtype=np.int64)
    for u, v in seen:
        if u != v and 0 <= u < graph.n and 0 <= v < graph.n:
            counted[u] += 1
            counted[v] += 1
    for i in np.flatnonzero(counted != graph.degree):
        problems.append(f"vertex {i}: degree {graph.degree[i]} but {counted[i]} incident edges")
    return problems


def is_connected(graph: Graph) -> bool:
    """Breadth-first reachability from vertex 0."""
    if graph.n <= 1:
        return True
    seen = [False] * graph.n
    seen[0] = True
    queue = deque([0])
    reached = 1
    while queue:
        u = queue.popleft()
        for v in graph.neighbors[u]:
            if not seen[v]:
                seen[v] = True
                reached += 1
                queue.append(v)
    return reached == graph.n


@dataclass(frozen=True)
class BAParams:
    """Barabási-Albert growth parameters.

    Attributes:
        m0: Size of the complete seed graph.
        t: Number of vertices added by preferential attachment.
        m: Edges attached per added vertex (``m <= m0``).
        seed: Seed for ``numpy.random.default_rng``.
    """

    m0: int = 5
    t: int = 95
    m: int = 5
    seed: int = 0

    def __post_init__(self):
        if self.m0 < 1:
            raise ParameterError(f"m0 must be >= 1, got {self.m0}")
        if self.t < 0:
            raise ParameterError(f"t must be >= 0, got {self.t}")
        if self.m < 1:
            raise ParameterError(f"m must be >= 1, got {self.m}")
        if self.m > self.m0:
            raise ParameterError(f"m ({self.m}) must not exceed m0 ({self.m0})")
        if not 0 <= self.seed < 2**64:
            raise ParameterError(f"seed must fit in 64 unsigned bits, got {self.seed}")

    @property
    def order(self) -> int:
        return self.m0 + self.t

    @property
    def edge_count(self) -> int:
        return math.comb(self.m0, 2) + self.m * self.t


def generate_ba(params: BAParams) -> Graph:
    """Grow a Barabási-Albert graph from a complete seed on ``m0`` vertices.

    Each new vertex picks ``m`` distinct targets with probability proportional
    to their degree at the start of the step; duplicate draws are redrawn.
    """
    rng = np.random.default_rng(params.seed)
    edges = [(u, v) for u in range(params.m0) for v in range(u + 1, params.m0)]
    # one entry per edge endpoint, so a uniform pick is degree-proportional
    endpoints = [x for e in edges for x in e]
    for new in range(params.m0, params.order):
        pool = len(endpoints)
        targets: list[int] = []
        while len(targets) < params.m:
            if pool:
                cand = endpoints[int(rng.integers(pool))]
            else:
                # single-vertex seed: no degree yet, fall back to uniform
                cand = int(rng.integers(new))
            if cand not in targets:
                targets.append(cand)
        for v in targets:
            edges.append((v, new))
            endpoints.extend((v, new))
    return Graph(params.order, edges)


def read_edge_list(text: str, n: int | None = None) -> Graph:
    """Parse ``u v`` lines; ``#`` starts a comment, blank lines are skipped.

    Without ``n`` the order is one more than the largest id seen.
    """
    pairs = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        fields = line.split()
        if len(fields) != 2:
            raise ParseError(f"expected 'u v', got {raw!r}", lineno)
        try:
            u, v = int(fields[0]), int(fields[1])
        except ValueError:
            raise ParseError(f"non-integer vertex id in {raw!r}", lineno) from None
        if u < 0 or v < 0 or (n is not None and max(u, v) >= n):
            raise ParseError(f"vertex id out of range in {raw!r}", lineno)
        if u == v:
            raise ParseError(f"self-loop at vertex {u}", lineno)
        pairs.append((u, v))
    order = n if n is not None else (max((max(p) for p in pairs), default=-1) + 1)
    return Graph(order, pairs)


def write_edge_list(graph: Graph) -> str:
    return "".join(f"{u} {v}\n" for u, v in graph.edges)
