"""Rate matrices and the damped fixed-point solve for likedness centrality.

A likedness vector ``L`` is any positive solution of

    L_i * sum_j A_ij L_j = sum_j R_ij L_j      for every vertex i,

where ``R_ij`` is the rate at which ``j`` likes ``i``. Scaling ``L`` and ``R``
by the same factor preserves the relation, so the solution is only meaningful
up to scale; :func:`normalize_unique` picks the representative with
``p . L = 1`` for the random-walk stationary distribution ``p``.
"""

from __future__ import annotations

import csv
import io
import logging
import math
from dataclasses import dataclass, field
from typing import Literal, Mapping

import numpy as np
import scipy.sparse as sp

from likecent.errors import (
    ConvergenceError,
    DegenerateGraphError,
    NumericalError,
    ParseError,
    ValidationError,
)
from likecent.graph import Graph
from likecent.markov import StationaryVector

logger = logging.getLogger(__name__)

Normalization = Literal["raw", "p-unit", "log-stationary"]


@dataclass(frozen=True, eq=False)
class RateMatrix:
    """Positive like-rates on every ordered edge pair of ``graph``.

    ``values[k]`` is the rate for the arc ``(graph.arcs[0][k], graph.arcs[1][k])``.
    Use :meth:`from_entries` to build one from an ``{(i, j): rate}`` mapping.
    """

    graph: Graph
    values: np.ndarray

    def __post_init__(self):
        vals = np.array(self.values, dtype=float)
        if vals.shape != (2 * self.graph.m,):
            raise ValidationError(f"expected {2 * self.graph.m} arc rates, got shape {vals.shape}")
        bad = np.flatnonzero(~(np.isfinite(vals) & (vals > 0)))
        if bad.size:
            k = bad[0]
            i, j = self.graph.arcs[0][k], self.graph.arcs[1][k]
            raise ValidationError(f"rate for pair ({i}, {j}) must be positive and finite, got {vals[k]!r}")
        vals.flags.writeable = False
        object.__setattr__(self, "values", vals)

    @classmethod
    def from_entries(cls, graph: Graph, entries: Mapping[tuple[int, int], float]) -> RateMatrix:
        heads, tails = graph.arcs
        index = {(int(i), int(j)): k for k, (i, j) in enumerate(zip(heads, tails))}
        vals = np.full(heads.size, np.nan)
        for (i, j), r in entries.items():
            k = index.get((int(i), int(j)))
            if k is None:
                raise ValidationError(f"rate given for pair ({i}, {j}) which is not an edge of the graph")
            vals[k] = r
        missing = np.flatnonzero(np.isnan(vals))
        if missing.size:
            k = missing[0]
            raise ValidationError(f"no rate for ordered edge pair ({heads[k]}, {tails[k]})")
        return cls(graph, vals)

    @classmethod
    def uniform(cls, graph: Graph, rate: float) -> RateMatrix:
        return cls(graph, np.full(2 * graph.m, float(rate)))

    @property
    def n(self) -> int:
        return self.graph.n

    @property
    def matrix(self) -> sp.csr_matrix:
        adj = self.graph.adjacency
        return sp.csr_matrix((self.values, adj.indices, adj.indptr), shape=adj.shape)

    def entries(self) -> dict[tuple[int, int], float]:
        heads, tails = self.graph.arcs
        return {(int(i), int(j)): float(r) for i, j, r in zip(heads, tails, self.values)}

    def scaled(self, c: float) -> RateMatrix:
        return RateMatrix(self.graph, self.values * c)

    def relabel(self, perm) -> RateMatrix:
        perm = list(perm)
        return RateMatrix.from_entries(
            self.graph.relabel(perm), {(perm[i], perm[j]): r for (i, j), r in self.entries().items()}
        )


def read_rates_csv(text: str, graph: Graph) -> RateMatrix:
    """Load an ``i,j,rate`` CSV (``#`` comment lines allowed) against ``graph``."""
    lines = [ln for ln in text.splitlines() if ln.strip() and not ln.lstrip().startswith("#")]
    reader = csv.reader(lines)
    header = next(reader, None)
    if header is None or [h.strip() for h in header] != ["i", "j", "rate"]:
        raise ParseError(f"expected header 'i,j,rate', got {header!r}", 1)
    entries: dict[tuple[int, int], float] = {}
    for row_no, row in enumerate(reader, start=2):
        if len(row) != 3:
            raise ParseError(f"expected 3 fields, got {row!r}", row_no)
        try:
            i, j, r = int(row[0]), int(row[1]), float(row[2])
        except ValueError:
            raise ParseError(f"bad numeric field in {row!r}", row_no) from None
        if (i, j) in entries:
            raise ParseError(f"duplicate pair ({i}, {j})", row_no)
        entries[(i, j)] = r
    return RateMatrix.from_entries(graph, entries)


def write_rates_csv(rates: RateMatrix) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["i", "j", "rate"])
    for (i, j), r in rates.entries().items():
        writer.writerow([i, j, repr(r)])
    return buf.getvalue()


@dataclass(frozen=True, eq=False)
class LikednessVector:
    """Positive per-vertex likedness with its normalization tag.

    ``iterations`` and ``residual`` are filled in by :func:`solve`.
    """

    values: np.ndarray
    normalization: Normalization = "raw"
    iterations: int | None = None
    residual: float | None = None

    def __post_init__(self):
        vals = np.array(self.values, dtype=float)
        if not np.all(np.isfinite(vals) & (vals > 0)):
            raise NumericalError("likedness values must be positive and finite")
        object.__setattr__(self, "values", vals)

    def __len__(self):
        return self.values.size


@dataclass(frozen=True)
class SolverConfig:
    tol: float = 1e-10
    max_iter: int = 100_000
    damping: float = 0.5
    initial: np.ndarray | None = field(default=None, compare=False)

    def __post_init__(self):
        if not self.tol > 0:
            raise ValueError(f"tol must be positive, got {self.tol}")
        if not 0 < self.damping <= 1:
            raise ValueError(f"damping must lie in (0, 1], got {self.damping}")
        if self.max_iter < 1:
            raise ValueError(f"max_iter must be >= 1, got {self.max_iter}")


def sigma(graph: Graph, L, i: int) -> float:
    """Sum of ``L`` over the neighbors of ``i``."""
    if not graph.neighbors[i]:
        raise DegenerateGraphError(f"vertex {i} is isolated")
    vals = L.values if isinstance(L, LikednessVector) else np.asarray(L, dtype=float)
    return math.fsum(vals[list(graph.neighbors[i])])


def update_map(graph: Graph, rates: RateMatrix, L) -> np.ndarray:
    """The undamped update ``F_i(L) = (R L)_i / sigma_i(L)``."""
    L = np.asarray(L, dtype=float)
    return (rates.matrix @ L) / (graph.adjacency @ L)


def residual(graph: Graph, rates: RateMatrix, L) -> np.ndarray:
    """Per-vertex ``sum_j (A_ij L_i - R_ij) L_j`` divided by ``L_i sigma_i``."""
    L = L.values if isinstance(L, LikednessVector) else np.asarray(L, dtype=float)
    s = graph.adjacency @ L
    return (L * s - rates.matrix @ L) / (L * s)


def solve(graph: Graph, rates: RateMatrix, cfg: SolverConfig | None = None) -> LikednessVector:
    """Damped fixed-point iteration ``L <- (1 - a) L + a F(L)``.

    Stops once the relative residual is at most ``cfg.tol`` in every vertex.

    Raises:
        DegenerateGraphError: a vertex has no neighbors.
        ConvergenceError: ``cfg.max_iter`` iterations without meeting ``cfg.tol``.
        NumericalError: an iterate lost positivity.
    """
    cfg = cfg or SolverConfig()
    if rates.graph != graph:
        raise ValidationError("rate matrix is bound to a different graph")
    if graph.n and np.any(graph.degree == 0):
        raise DegenerateGraphError(f"isolated vertices {np.flatnonzero(graph.degree == 0).tolist()}")
    A = graph.adjacency
    R = rates.matrix
    if cfg.initial is None:
        L = np.ones(graph.n)
    else:
        L = np.array(cfg.initial, dtype=float)
        if L.shape != (graph.n,) or not np.all(L > 0):
            raise ValueError("initial vector must be positive with one entry per vertex")
    a = cfg.damping
    res = np.inf
    for it in range(cfg.max_iter + 1):
        s = A @ L
        RL = R @ L
        res = float(np.max(np.abs(L * s - RL) / (L * s))) if graph.n else 0.0
        if res <= cfg.tol:
            return LikednessVector(L, "raw", iterations=it, residual=res)
        if it == cfg.max_iter:
            break
        L = (1.0 - a) * L + a * (RL / s)
        if not np.all(L > 0):
            raise NumericalError(f"non-positive likedness iterate at iteration {it + 1}")
    logger.debug("likedness solve stalled at residual %.3e", res)
    raise ConvergenceError("likedness iteration did not converge", res, cfg.max_iter)


def normalize_unique(L: LikednessVector, p: StationaryVector | np.ndarray) -> LikednessVector:
    """Rescale so that ``p . L = 1``."""
    pv = p.p if isinstance(p, StationaryVector) else np.asarray(p, dtype=float)
    scale = math.fsum(pv * L.values)
    return LikednessVector(L.values / scale, "p-unit", L.iterations, L.residual)
