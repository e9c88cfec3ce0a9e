"""Monte Carlo ensembles of exponential like-rates on a fixed graph.

Each ensemble ``e`` draws its rates from ``SeedSequence(master_seed,
spawn_key=(e,))``, so results do not depend on which worker ran which
ensemble or in what order. All reductions run over index-ordered arrays.
"""

from __future__ import annotations

import logging
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from likecent.centrality import all_centralities
from likecent.desirability import neighbor_desirability
from likecent.errors import ConvergenceError, ExperimentError, NumericalError
from likecent.graph import Graph, is_connected
from likecent.likedness import RateMatrix, SolverConfig, normalize_unique, solve
from likecent.markov import degree_stationary

logger = logging.getLogger(__name__)

MAX_FAILURE_FRACTION = 0.01


@dataclass(frozen=True)
class ExperimentConfig:
    """One Monte Carlo run on a fixed graph.

    ``rate_lambda`` is the exponential rate parameter, so rates have mean
    ``1 / rate_lambda``.
    """

    graph: Graph
    ensemble_count: int = 1000
    rate_lambda: float = 0.5
    master_seed: int = 0
    solver: SolverConfig = field(default_factory=SolverConfig)
    bins: int = 30
    workers: int = 1

    def __post_init__(self):
        if self.ensemble_count < 1:
            raise ValueError(f"ensemble_count must be >= 1, got {self.ensemble_count}")
        if not self.rate_lambda > 0:
            raise ValueError(f"rate_lambda must be positive, got {self.rate_lambda}")
        if self.bins < 1:
            raise ValueError(f"bins must be >= 1, got {self.bins}")
        if self.workers < 1:
            raise ValueError(f"workers must be >= 1, got {self.workers}")
        if not 0 <= self.master_seed < 2**64:
            raise ValueError("master_seed must fit in 64 unsigned bits")

    def describe(self) -> dict:
        return {
            "n": self.graph.n,
            "edges": self.graph.m,
            "ensemble_count": self.ensemble_count,
            "rate_lambda": self.rate_lambda,
            "master_seed": self.master_seed,
            "solver": {"tol": self.solver.tol, "max_iter": self.solver.max_iter, "damping": self.solver.damping},
            "bins": self.bins,
        }


@dataclass(frozen=True, eq=False)
class EnsembleResult:
    index: int
    likedness: np.ndarray
    desirability: np.ndarray
    iterations: int
    residual: float


@dataclass(frozen=True)
class EnsembleFailure:
    index: int
    reason: str
    residual: float


@dataclass(frozen=True, eq=False)
class BinnedCurve:
    """Means of ``x`` and ``y`` within log-spaced bins of ``x``; empty bins hold NaN."""

    edges: np.ndarray
    centers: np.ndarray
    counts: np.ndarray
    mean_x: np.ndarray
    mean_y: np.ndarray

    def points(self) -> np.ndarray:
        keep = self.counts > 0
        return np.column_stack([self.mean_x[keep], self.mean_y[keep]])


def binned_means(x, y, bins: int = 30) -> BinnedCurve:
    x = np.asarray(x, dtype=float).ravel()
    y = np.asarray(y, dtype=float).ravel()
    edges = _log_edges(x, bins)
    which = _bin_index(x, edges)
    counts = np.bincount(which, minlength=bins)
    sum_x = np.bincount(which, weights=x, minlength=bins)
    sum_y = np.bincount(which, weights=y, minlength=bins)
    with np.errstate(invalid="ignore", divide="ignore"):
        mean_x = np.where(counts > 0, sum_x / counts, np.nan)
        mean_y = np.where(counts > 0, sum_y / counts, np.nan)
    return BinnedCurve(edges, np.sqrt(edges[:-1] * edges[1:]), counts, mean_x, mean_y)


@dataclass(frozen=True, eq=False)
class NeighborCurve:
    """Own ND (binned, log-spaced) against the desirability of one's neighbors.

    Empty bins hold NaN in ``mean_neighbor`` and ``scaled_summary``.

    Attributes:
        edges: Bin edges for own ND, ``bins + 1`` values.
        centers: Geometric bin centers.
        counts: Observations per bin.
        mean_own: Mean own ND per bin.
        mean_neighbor: Mean over observations of the arithmetic mean of the
            neighbors' ND in the same ensemble.
        over_representation: ``ratio[b, k]`` is the density of neighbor ND in
            bin ``k`` given own ND in bin ``b``, over the global ND density in
            bin ``k``.
        scaled_summary: Per own-ND bin, the neighbor-ND bin centers averaged
            with ``over_representation`` as weights.
    """

    edges: np.ndarray
    centers: np.ndarray
    counts: np.ndarray
    mean_own: np.ndarray
    mean_neighbor: np.ndarray
    over_representation: np.ndarray
    scaled_summary: np.ndarray
    correlation: float

    def points(self) -> np.ndarray:
        keep = self.counts > 0
        return np.column_stack([self.mean_own[keep], self.mean_neighbor[keep]])


@dataclass(frozen=True, eq=False)
class AggregateDataset:
    """Everything derived from one experiment.

    ``likedness_curve`` bins every (node, ensemble) observation by own L*
    and averages ND per bin; the per-node means compress L* to a narrow
    band around 1 when rates are i.i.d.
    """

    config: ExperimentConfig
    results: list[EnsembleResult]
    failures: list[EnsembleFailure]
    mean_likedness: np.ndarray
    mean_desirability: np.ndarray
    centralities: dict[str, np.ndarray]
    curve: NeighborCurve
    likedness_curve: BinnedCurve
    histogram_edges: np.ndarray
    histogram_counts: np.ndarray

    @property
    def accepted(self) -> int:
        return len(self.results)


def ensemble_seed(master_seed: int, index: int) -> np.random.SeedSequence:
    return np.random.SeedSequence(master_seed, spawn_key=(index,))


def sample_rates(graph: Graph, rate_lambda: float, stream_seed) -> RateMatrix:
    """One exponential draw (mean ``1 / rate_lambda``) per ordered edge pair."""
    if not rate_lambda > 0:
        raise ValueError(f"rate_lambda must be positive, got {rate_lambda}")
    rng = np.random.default_rng(stream_seed)
    return RateMatrix(graph, rng.exponential(1.0 / rate_lambda, size=2 * graph.m))


def run_ensemble(graph: Graph, cfg: ExperimentConfig, index: int, p: np.ndarray):
    rates = sample_rates(graph, cfg.rate_lambda, ensemble_seed(cfg.master_seed, index))
    try:
        L = solve(graph, rates, cfg.solver)
    except (ConvergenceError, NumericalError) as exc:
        return EnsembleFailure(index, type(exc).__name__, float(getattr(exc, "residual", math.nan)))
    unit = normalize_unique(L, p)
    nd = neighbor_desirability(graph, rates, unit)
    return EnsembleResult(index, unit.values, nd.values, L.iterations, L.residual)


def _run_chunk(args):
    cfg, indices = args
    p = degree_stationary(cfg.graph).p
    return [run_ensemble(cfg.graph, cfg, e, p) for e in indices]


def _chunks(count: int, parts: int) -> list[range]:
    step = math.ceil(count / parts)
    return [range(lo, min(lo + step, count)) for lo in range(0, count, step)]


def neighbor_pair_curve(graph: Graph, results: list[EnsembleResult], bins: int = 30) -> NeighborCurve:
    """Bin every (node, ensemble) observation by own ND; see :class:`NeighborCurve`."""
    if not results:
        raise ValueError("need at least one ensemble")
    nd = np.stack([r.desirability for r in results])
    deg = graph.degree.astype(float)
    nbr_mean = (graph.adjacency @ nd.T).T / deg
    own = nd.ravel()
    base = binned_means(own, nbr_mean, bins)
    edges, counts = base.edges, base.counts

    # every arc (i, j) in every ensemble contributes neighbor value ND_j to own bin of ND_i
    heads, tails = graph.arcs
    own_arc = _bin_index(nd[:, heads].ravel(), edges)
    nbr_arc = _bin_index(nd[:, tails].ravel(), edges)
    joint = np.zeros((bins, bins))
    np.add.at(joint, (own_arc, nbr_arc), 1.0)
    global_density = counts / counts.sum()
    row_tot = joint.sum(axis=1, keepdims=True)
    with np.errstate(invalid="ignore", divide="ignore"):
        cond = joint / row_tot
        ratio = np.where((row_tot > 0) & (global_density > 0), cond / global_density, np.nan)
    centers = base.centers
    with np.errstate(invalid="ignore", divide="ignore"):
        w = np.nan_to_num(ratio)
        summary = np.where(counts > 0, (w * centers).sum(axis=1) / w.sum(axis=1), np.nan)
    corr = float(np.corrcoef(own, nbr_mean.ravel())[0, 1]) if own.size > 1 and np.ptp(own) > 0 else math.nan
    return NeighborCurve(edges, centers, counts, base.mean_x, base.mean_y, ratio, summary, corr)


def _log_edges(values: np.ndarray, bins: int) -> np.ndarray:
    lo, hi = float(values.min()), float(values.max())
    if lo == hi:
        lo, hi = lo / 1.01, hi * 1.01
    return np.geomspace(lo, hi, bins + 1)


def _bin_index(values: np.ndarray, edges: np.ndarray) -> np.ndarray:
    idx = np.searchsorted(edges, values, side="right") - 1
    return np.clip(idx, 0, edges.size - 2)


def run_experiment(cfg: ExperimentConfig) -> AggregateDataset:
    """Sample, solve and aggregate ``cfg.ensemble_count`` rate ensembles.

    Raises:
        ExperimentError: the graph is disconnected, or more than 1% of the
            solves failed to converge.
    """
    graph = cfg.graph
    if not is_connected(graph) or graph.n < 2:
        raise ExperimentError("experiment needs a connected graph with at least two vertices")
    if cfg.workers == 1:
        outcomes = _run_chunk((cfg, range(cfg.ensemble_count)))
    else:
        work = [(cfg, c) for c in _chunks(cfg.ensemble_count, cfg.workers * 4)]
        with ProcessPoolExecutor(max_workers=cfg.workers) as pool:
            outcomes = [o for chunk in pool.map(_run_chunk, work) for o in chunk]
    outcomes.sort(key=lambda o: o.index)
    results = [o for o in outcomes if isinstance(o, EnsembleResult)]
    failures = [o for o in outcomes if isinstance(o, EnsembleFailure)]
    if len(failures) > MAX_FAILURE_FRACTION * cfg.ensemble_count:
        raise ExperimentError(f"{len(failures)} of {cfg.ensemble_count} solves failed")
    if failures:
        logger.warning("%d ensembles excluded after solver failure", len(failures))

    Ls = np.stack([r.likedness for r in results])
    NDs = np.stack([r.desirability for r in results])
    curve = neighbor_pair_curve(graph, results, cfg.bins)
    hist_counts = curve.counts.copy()
    return AggregateDataset(
        config=cfg,
        results=results,
        failures=failures,
        mean_likedness=Ls.mean(axis=0),
        mean_desirability=NDs.mean(axis=0),
        centralities={k: v.values for k, v in all_centralities(graph).items()},
        curve=curve,
        likedness_curve=binned_means(Ls, NDs, cfg.bins),
        histogram_edges=curve.edges,
        histogram_counts=hist_counts,
    )
