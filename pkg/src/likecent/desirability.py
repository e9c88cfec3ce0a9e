"""Neighbor desirability and the random-walk product formula.

Neighbor desirability of ``i`` is the geometric mean of the rates at which
``i`` is liked, divided by the arithmetic mean likedness of its neighbors.
The product formula rebuilds likedness as

    L_i ~ prod_j ND_j ** W_n[i, j],    W_n = sum_{t=0}^{n} P^t,

evaluated in log space. Its exponents grow linearly in ``n`` unless the
stationary-weighted mean of ``log ND`` is zero, which is why
:func:`log_stationary_normalize` exists.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from likecent.errors import DegenerateGraphError
from likecent.graph import Graph
from likecent.likedness import LikednessVector, Normalization, RateMatrix, normalize_unique
from likecent.markov import StationaryVector, power_sum_apply, transition_matrix


@dataclass(frozen=True, eq=False)
class DesirabilityVector:
    values: np.ndarray
    basis: Normalization

    def __len__(self):
        return self.values.size


@dataclass(frozen=True, eq=False)
class ProductEvalReport:
    """Diagnostics of the truncated product formula at truncation ``n``.

    Attributes:
        n: Truncation length.
        products: Truncated product per vertex.
        ratio: ``products / L`` per vertex, ``L`` in the log-stationary basis.
        cv: Coefficient of variation of ``ratio``; zero iff the product
            reproduces ``L`` up to one global factor.
        drift: ``p . log ND`` evaluated at the p-unit likedness; the per-step
            growth the exponents would have without log-stationary scaling.
        log_scale_gap: ``log`` of the factor taking the p-unit likedness to
            the log-stationary one (equals ``drift``).
    """

    n: int
    products: np.ndarray
    ratio: np.ndarray
    cv: float
    drift: float
    log_scale_gap: float


def _pvec(p) -> np.ndarray:
    return p.p if isinstance(p, StationaryVector) else np.asarray(p, dtype=float)


def log_geometric_mean_incoming(graph: Graph, rates: RateMatrix) -> np.ndarray:
    """Per-vertex mean of ``log R_ij`` over neighbors ``j``."""
    if graph.n and np.any(graph.degree == 0):
        raise DegenerateGraphError(f"isolated vertices {np.flatnonzero(graph.degree == 0).tolist()}")
    heads, _ = graph.arcs
    sums = np.zeros(graph.n)
    for i in range(graph.n):
        lo, hi = graph.adjacency.indptr[i], graph.adjacency.indptr[i + 1]
        sums[i] = math.fsum(np.log(rates.values[lo:hi]))
    return sums / graph.degree


def geometric_mean_incoming(graph: Graph, rates: RateMatrix, i: int) -> float:
    """``(prod_j R_ij) ** (1 / deg_i)`` computed from logs."""
    if not graph.neighbors[i]:
        raise DegenerateGraphError(f"vertex {i} is isolated")
    lo, hi = graph.adjacency.indptr[i], graph.adjacency.indptr[i + 1]
    return math.exp(math.fsum(np.log(rates.values[lo:hi])) / (hi - lo))


def _log_nd(graph: Graph, rates: RateMatrix, L: np.ndarray) -> np.ndarray:
    mean_nbr = (graph.adjacency @ L) / graph.degree
    return log_geometric_mean_incoming(graph, rates) - np.log(mean_nbr)


def neighbor_desirability(graph: Graph, rates: RateMatrix, L: LikednessVector) -> DesirabilityVector:
    """``GM(incoming rates) / AM(neighbor likedness)`` per vertex."""
    return DesirabilityVector(np.exp(_log_nd(graph, rates, L.values)), L.normalization)


def stationary_log_drift(graph: Graph, rates: RateMatrix, L: LikednessVector, p) -> float:
    """``sum_j p_j log ND_j(L)``."""
    return math.fsum(_pvec(p) * _log_nd(graph, rates, L.values))


def log_stationary_normalize(graph: Graph, rates: RateMatrix, L: LikednessVector, p) -> LikednessVector:
    """Rescale ``L`` so that ``sum_j p_j log ND_j = 0``.

    Multiplying ``L`` by ``c`` shifts every ``log ND_j`` by ``-log c``, so the
    required factor is ``exp(p . log ND(L))``.
    """
    log_c = stationary_log_drift(graph, rates, L, p)
    return LikednessVector(L.values * math.exp(log_c), "log-stationary", L.iterations, L.residual)


def _require_log_stationary(L: LikednessVector) -> None:
    if L.normalization != "log-stationary":
        raise ValueError(f"product formula needs a log-stationary basis, got {L.normalization!r}")


def product_formula_eval(
    graph: Graph, rates: RateMatrix, L_basis: LikednessVector, i: int, n: int, cesaro: bool = False
) -> float:
    """Truncated product for one vertex: ``exp(sum_j W_n[i, j] log ND_j)``."""
    _require_log_stationary(L_basis)
    return float(product_formula_all(graph, rates, L_basis, n, cesaro)[i])


def product_formula_all(
    graph: Graph, rates: RateMatrix, L_basis: LikednessVector, n: int, cesaro: bool = False
) -> np.ndarray:
    """Truncated product for every vertex at once.

    ``cesaro=True`` replaces the exponent row ``W_n`` by the mean of
    ``W_0..W_n``; on bipartite graphs the plain truncation oscillates with the
    parity of ``n``.
    """
    _require_log_stationary(L_basis)
    if n < 0:
        raise ValueError("n must be >= 0")
    P = transition_matrix(graph)
    return np.exp(power_sum_apply(P, _log_nd(graph, rates, L_basis.values), n, cesaro))


def product_formula_report(
    graph: Graph, rates: RateMatrix, L: LikednessVector, p, n: int, cesaro: bool = False
) -> ProductEvalReport:
    """Compare the truncated product against a solved likedness vector ``L``.

    ``L`` may carry any normalization; both the p-unit and log-stationary
    versions are derived from it. The product reproduces ``L`` only up to a
    global factor, so agreement is measured by the spread of the ratio.
    """
    unit = normalize_unique(L, p)
    basis = log_stationary_normalize(graph, rates, unit, p)
    drift = stationary_log_drift(graph, rates, unit, p)
    products = product_formula_all(graph, rates, basis, n, cesaro)
    ratio = products / basis.values
    cv = float(np.std(ratio) / np.mean(ratio))
    gap = math.log(basis.values[0] / unit.values[0]) if graph.n else 0.0
    return ProductEvalReport(n, products, ratio, cv, drift, gap)
