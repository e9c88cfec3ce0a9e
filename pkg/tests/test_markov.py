import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from likecent.errors import DegenerateGraphError
from likecent.graph import BAParams, Graph, generate_ba
from likecent.markov import degree_stationary, power_sum_row, stationary, transition_matrix

from conftest import complete_graph, cycle_graph, path_graph, random_connected_graph, star_graph


class TestTransitionMatrix:
    def test_k2(self):
        np.testing.assert_array_equal(transition_matrix(complete_graph(2)).dense(), [[0, 1], [1, 0]])

    def test_p3_middle_row(self):
        np.testing.assert_array_equal(transition_matrix(path_graph(3)).dense()[1], [0.5, 0, 0.5])

    def test_k3(self):
        P = transition_matrix(complete_graph(3)).dense()
        np.testing.assert_array_equal(P, (np.ones((3, 3)) - np.eye(3)) / 2)

    def test_rows_stochastic_with_neighbor_support(self, rng):
        g = random_connected_graph(rng, 12)
        P = transition_matrix(g).dense()
        np.testing.assert_allclose(P.sum(axis=1), 1.0, atol=1e-12)
        for i in range(g.n):
            support = set(np.flatnonzero(P[i]).tolist())
            assert support == set(g.neighbors[i])
            np.testing.assert_array_equal(P[i, list(support)], 1.0 / g.degree[i])

    def test_isolated_vertex(self):
        with pytest.raises(DegenerateGraphError):
            transition_matrix(Graph(3, [(0, 1)]))


class TestStationary:
    def test_p3(self):
        np.testing.assert_allclose(stationary(path_graph(3)).p, [0.25, 0.5, 0.25], atol=1e-12)

    @pytest.mark.parametrize("g", [complete_graph(5), cycle_graph(6), cycle_graph(7)])
    def test_regular_is_uniform(self, g):
        np.testing.assert_allclose(stationary(g).p, 1.0 / g.n, atol=1e-12)

    def test_ba_matches_degree_closed_form(self):
        g = generate_ba(BAParams(5, 95, 5, seed=3))
        np.testing.assert_allclose(stationary(g).p, degree_stationary(g).p, rtol=0, atol=1e-10)

    def test_bipartite_star_converges(self):
        g = star_graph(4)
        np.testing.assert_allclose(stationary(g).p, [0.5, 0.125, 0.125, 0.125, 0.125], atol=1e-12)

    def test_left_fixed_point(self, rng):
        g = random_connected_graph(rng, 15)
        p = stationary(g).p
        P = transition_matrix(g).dense()
        np.testing.assert_allclose(p @ P, p, atol=1e-13)
        assert np.all(p > 0)
        assert abs(p.sum() - 1) < 1e-12

    def test_relabel_invariance(self, rng):
        g = random_connected_graph(rng, 10)
        perm = rng.permutation(g.n)
        p = stationary(g).p
        q = stationary(g.relabel(perm)).p
        np.testing.assert_allclose(q[perm], p, atol=1e-12)


class TestPowerSumRow:
    def test_zero_steps_is_indicator(self, rng):
        g = random_connected_graph(rng, 6)
        np.testing.assert_array_equal(power_sum_row(g, 2, 0), np.eye(6)[2])

    def test_k2_one_step(self):
        np.testing.assert_array_equal(power_sum_row(complete_graph(2), 0, 1), [1.0, 1.0])

    def test_matches_dense_powers(self, rng):
        g = random_connected_graph(rng, 7)
        P = transition_matrix(g).dense()
        expected = sum(np.linalg.matrix_power(P, t) for t in range(13))[4]
        np.testing.assert_allclose(power_sum_row(g, 4, 12), expected, atol=1e-13)

    @settings(max_examples=25, deadline=None)
    @given(seed=st.integers(0, 10**6), n_max=st.integers(0, 300))
    def test_nonnegative_and_total(self, seed, n_max):
        rng = np.random.default_rng(seed)
        g = random_connected_graph(rng, int(rng.integers(2, 12)))
        row = power_sum_row(g, int(rng.integers(g.n)), n_max)
        assert np.all(row >= 0)
        assert abs(row.sum() - (n_max + 1)) < 1e-9

    @pytest.mark.parametrize("g", [complete_graph(2), path_graph(5), star_graph(3)])
    def test_cesaro_mean_on_bipartite(self, g):
        n = 10_000
        avg = power_sum_row(g, 0, n) / n
        assert np.max(np.abs(avg - degree_stationary(g).p)) < 1e-3

    def test_cesaro_mean_on_ba(self):
        g = generate_ba(BAParams(5, 95, 5, seed=8))
        n = 10_000
        avg = power_sum_row(g, 17, n) / n
        assert np.max(np.abs(avg - degree_stationary(g).p)) < 1e-3
