"""Random walk on a graph: transition matrix, stationary distribution, power sums."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp

from likecent.errors import ConvergenceError, DegenerateGraphError
from likecent.graph import Graph


@dataclass(frozen=True)
class TransitionMatrix:
    """Row-stochastic ``diag(1/deg) @ A`` stored as CSR."""

    n: int
    rows: sp.csr_matrix

    def dense(self) -> np.ndarray:
        return self.rows.toarray()


@dataclass(frozen=True)
class StationaryVector:
    p: np.ndarray
    iterations: int = 0
    residual: float = 0.0


def _require_no_isolated(graph: Graph) -> None:
    if graph.n and np.any(graph.degree == 0):
        isolated = np.flatnonzero(graph.degree == 0)
        raise DegenerateGraphError(f"isolated vertices {isolated.tolist()} have no random-walk step")


def transition_matrix(graph: Graph) -> TransitionMatrix:
    _require_no_isolated(graph)
    inv_deg = sp.diags(1.0 / graph.degree)
    return TransitionMatrix(graph.n, sp.csr_matrix(inv_deg @ graph.adjacency))


def degree_stationary(graph: Graph) -> StationaryVector:
    """Closed form ``deg / sum(deg)`` for a connected undirected graph."""
    _require_no_isolated(graph)
    deg = graph.degree.astype(float)
    return StationaryVector(deg / deg.sum())


def stationary(graph: Graph, tol: float = 1e-15, max_iter: int = 1_000_000) -> StationaryVector:
    """Stationary distribution by averaged power iteration.

    Iterates the lazy kernel ``(I + P) / 2``; each step averages the current
    iterate with its plain successor, which removes the period-2 oscillation
    of bipartite walks while keeping the same fixed point. Stops when
    ``max|x P - x| <= tol``.
    """
    P = transition_matrix(graph).rows
    PT = P.T.tocsr()
    x = np.full(graph.n, 1.0 / graph.n)
    res = np.inf
    for it in range(1, max_iter + 1):
        step = PT @ x
        res = float(np.max(np.abs(step - x)))
        if res <= tol:
            return StationaryVector(x / x.sum(), it, res)
        x = 0.5 * (x + step)
        x /= x.sum()
    raise ConvergenceError("stationary distribution did not converge", res, max_iter)


def _neumaier_add(total: np.ndarray, comp: np.ndarray, term: np.ndarray) -> None:
    t = total + term
    big = np.abs(total) >= np.abs(term)
    comp += np.where(big, (total - t) + term, (term - t) + total)
    total[:] = t


def power_sum_apply(P: TransitionMatrix, x: np.ndarray, n_max: int, cesaro: bool = False) -> np.ndarray:
    """``sum_{t=0}^{n_max} P^t @ x`` by repeated sparse products, compensated.

    With ``cesaro=True`` returns the mean of the partial sums ``S_0..S_n_max``
    instead, which has a limit on bipartite graphs where ``S_n`` alternates.
    """
    v = np.asarray(x, dtype=float).copy()
    total = v.copy()
    comp = np.zeros_like(total)
    acc = total.copy()
    acc_comp = np.zeros_like(total)
    for _ in range(n_max):
        v = P.rows @ v
        _neumaier_add(total, comp, v)
        if cesaro:
            _neumaier_add(acc, acc_comp, total + comp)
    if cesaro:
        return (acc + acc_comp) / (n_max + 1)
    return total + comp


def power_sum_row(graph: Graph, i: int, n_max: int) -> np.ndarray:
    """Row ``i`` of ``sum_{t=0}^{n_max} P^t``; never forms a matrix power."""
    if n_max < 0:
        raise ValueError("n_max must be >= 0")
    PT = transition_matrix(graph).rows.T.tocsr()
    v = np.zeros(graph.n)
    v[i] = 1.0
    total = v.copy()
    comp = np.zeros_like(total)
    for _ in range(n_max):
        v = PT @ v
        _neumaier_add(total, comp, v)
    return total + comp
