import numpy as np
import pytest
from scipy.optimize import root

from likecent.errors import ConvergenceError, DegenerateGraphError, NumericalError, ParseError, ValidationError
from likecent.graph import Graph
from likecent.likedness import (
    LikednessVector,
    RateMatrix,
    SolverConfig,
    normalize_unique,
    read_rates_csv,
    residual,
    sigma,
    solve,
    update_map,
    write_rates_csv,
)
from likecent.markov import degree_stationary

from conftest import complete_graph, exponential_rates, random_connected_graph, star_graph

# closed-form checks are asserted to 1e-12, below the default stopping tolerance
TIGHT = SolverConfig(tol=1e-14)


def root_finder_oracle(graph, rates, start):
    """Solve sum_j (A_ij L_i - R_ij) L_j = 0 with a generic root-finder.

    Works on log L so positivity is built in; independent of the fixed-point
    iteration under test.
    """
    A = graph.adjacency.toarray()
    R = rates.matrix.toarray()

    def equations(logL):
        L = np.exp(logL)
        return (L * (A @ L) - R @ L) / (L * (A @ L))

    sol = root(equations, np.log(start), method="hybr", tol=1e-14)
    assert sol.success, sol.message
    return np.exp(sol.x)


class TestRateMatrix:
    def test_off_edge_pair_named(self):
        g = complete_graph(2)
        with pytest.raises(ValidationError, match=r"\(0, 2\)"):
            RateMatrix.from_entries(Graph(3, [(0, 1), (1, 2)]), {(0, 1): 1, (1, 0): 1, (1, 2): 1, (2, 1): 1, (0, 2): 1})
        with pytest.raises(ValidationError):
            RateMatrix.from_entries(g, {(0, 1): 1.0})

    @pytest.mark.parametrize("bad", [0.0, -1.0, np.inf, np.nan])
    def test_rejects_nonpositive_or_nonfinite(self, bad):
        with pytest.raises(ValidationError):
            RateMatrix.from_entries(complete_graph(2), {(0, 1): 1.0, (1, 0): bad})

    def test_csv_round_trip(self, rng):
        g = random_connected_graph(rng, 6)
        rates = exponential_rates(g, rng)
        back = read_rates_csv(write_rates_csv(rates), g)
        np.testing.assert_array_equal(back.values, rates.values)

    def test_csv_header_required(self):
        with pytest.raises(ParseError):
            read_rates_csv("a,b,c\n0,1,1\n", complete_graph(2))

    def test_csv_off_edge(self):
        text = "i,j,rate\n0,1,1\n1,0,1\n1,2,1\n2,1,1\n0,2,4\n"
        with pytest.raises(ValidationError, match=r"\(0, 2\)"):
            read_rates_csv(text, Graph(3, [(0, 1), (1, 2)]))

    def test_matrix_orientation(self, k2_rates):
        R = k2_rates.matrix.toarray()
        assert R[0, 1] == 3.0 and R[1, 0] == 5.0


class TestSigma:
    def test_k2(self, k2):
        assert sigma(k2, np.array([3.0, 5.0]), 0) == 5.0

    def test_k3_uniform(self):
        assert all(sigma(complete_graph(3), np.ones(3), i) == 2.0 for i in range(3))

    def test_star_center(self):
        assert sigma(star_graph(3), np.array([9.0, 1.5, 2.5, 4.0]), 0) == 8.0

    def test_isolated(self):
        with pytest.raises(DegenerateGraphError):
            sigma(Graph(3, [(0, 1)]), np.ones(3), 2)


class TestSolve:
    def test_k2_incoming_rates(self, k2, k2_rates):
        L = solve(k2, k2_rates, TIGHT)
        np.testing.assert_allclose(L.values, [3.0, 5.0], rtol=1e-12)
        assert L.normalization == "raw"

    @pytest.mark.parametrize("r", [0.3, 1.0, 7.5])
    def test_k3_uniform(self, r):
        g = complete_graph(3)
        np.testing.assert_allclose(solve(g, RateMatrix.uniform(g, r), TIGHT).values, r, rtol=1e-12)

    @pytest.mark.parametrize("seed", range(5))
    def test_matches_root_finder_from_two_starts(self, seed):
        rng = np.random.default_rng(seed)
        g = random_connected_graph(rng, 6)
        rates = exponential_rates(g, rng)
        L = solve(g, rates)
        assert np.max(np.abs(residual(g, rates, L))) <= 1e-10
        p = degree_stationary(g)
        ours = normalize_unique(L, p).values
        for _ in range(2):
            oracle = root_finder_oracle(g, rates, rng.uniform(0.2, 5.0, g.n))
            np.testing.assert_allclose(normalize_unique(LikednessVector(oracle), p).values, ours, atol=1e-8)

    def test_reports_iterations_and_residual(self, rng):
        g = random_connected_graph(rng, 8)
        L = solve(g, exponential_rates(g, rng))
        assert L.iterations > 0 and L.residual <= 1e-10

    def test_iteration_cap(self, rng):
        g = random_connected_graph(rng, 8)
        with pytest.raises(ConvergenceError) as err:
            solve(g, exponential_rates(g, rng), SolverConfig(max_iter=3))
        assert err.value.residual > 1e-10

    def test_custom_start_reaches_same_point(self, rng):
        g = random_connected_graph(rng, 9)
        rates = exponential_rates(g, rng)
        a = solve(g, rates)
        b = solve(g, rates, SolverConfig(initial=rng.uniform(0.1, 10, g.n), damping=0.8))
        np.testing.assert_allclose(a.values, b.values, rtol=1e-8)

    def test_isolated_vertex(self):
        g = Graph(3, [(0, 1)])
        with pytest.raises(DegenerateGraphError):
            solve(g, RateMatrix.uniform(g, 1.0))

    @pytest.mark.parametrize("kw", [dict(tol=0), dict(damping=0), dict(damping=1.5), dict(max_iter=0)])
    def test_bad_config(self, kw):
        with pytest.raises(ValueError):
            SolverConfig(**kw)


class TestUpdateMap:
    def test_degree_zero_homogeneous(self, rng):
        g = random_connected_graph(rng, 10)
        rates = exponential_rates(g, rng)
        L = rng.uniform(0.5, 2.0, g.n)
        for c in (1e-3, 0.5, 17.0):
            np.testing.assert_allclose(update_map(g, rates, c * L), update_map(g, rates, L), rtol=1e-13)

    def test_positivity_preserved(self, rng):
        g = random_connected_graph(rng, 10)
        rates = exponential_rates(g, rng)
        L = np.ones(g.n)
        for _ in range(200):
            L = 0.5 * L + 0.5 * update_map(g, rates, L)
            assert np.all(L > 0)


class TestNormalize:
    def test_k2(self):
        L = normalize_unique(LikednessVector([3.0, 5.0]), np.array([0.5, 0.5]))
        np.testing.assert_allclose(L.values, [0.75, 1.25], rtol=1e-15)
        assert L.normalization == "p-unit"

    def test_idempotent_and_scale_free(self, rng):
        p = rng.dirichlet(np.ones(6))
        L = LikednessVector(rng.uniform(0.1, 3, 6))
        once = normalize_unique(L, p)
        np.testing.assert_allclose(normalize_unique(once, p).values, once.values, rtol=1e-15)
        np.testing.assert_allclose(normalize_unique(LikednessVector(7 * L.values), p).values, once.values, rtol=1e-14)
        assert abs(p @ once.values - 1) < 1e-10

    def test_rejects_nonpositive(self):
        with pytest.raises(NumericalError):
            LikednessVector([1.0, 0.0])


class TestResidual:
    def test_k2_exact(self, k2, k2_rates):
        np.testing.assert_array_equal(residual(k2, k2_rates, [3.0, 5.0]), [0.0, 0.0])

    def test_fixed_point_small(self, rng):
        g = random_connected_graph(rng, 8)
        rates = exponential_rates(g, rng)
        assert np.max(np.abs(residual(g, rates, solve(g, rates)))) <= 1e-10

    def test_ten_percent_perturbation(self, rng):
        g = random_connected_graph(rng, 8)
        rates = exponential_rates(g, rng)
        L = solve(g, rates).values.copy()
        L[3] *= 1.1
        # direct evaluation: (1.1 - 1) / 1.1 up to the fixed-point residual
        r = residual(g, rates, L)
        assert r[3] > 0.05
        assert abs(r[3] - 0.1 / 1.1) < 1e-9
