import numpy as np
import pytest
from scipy import stats

from relsort import (Dag, LinearScm, Rng, adaptive_lasso_bic, correlation_matrix,
                     correlation_threshold, criterion_order,
                     estimate_relative_counts, estimate_relative_order, ols,
                     rel_criterion, rel_sort_n_regress, sample_er_dag,
                     sample_observations, sample_params, sort_n_regress,
                     sortability)
from relsort.discovery import _coordinate_descent, _student_t_quantile
from relsort.sortability import NumericalFallbackWarning


def collider_scm(w=0.9):
    g = Dag.from_edges(3, [(0, 2), (1, 2)])
    weights = np.zeros((3, 3))
    weights[0, 2] = weights[1, 2] = w
    return LinearScm(g, weights, np.ones(3))


class TestCorrelationMatrix:
    def test_identical_columns(self):
        x = np.random.default_rng(0).normal(size=100)
        corr = correlation_matrix(np.column_stack([x, x]))
        assert corr[0, 1] == pytest.approx(1.0)

    def test_negated_column(self):
        x = np.random.default_rng(1).normal(size=100)
        corr = correlation_matrix(np.column_stack([x, -x]))
        assert corr[0, 1] == pytest.approx(-1.0)

    def test_independent_columns_small(self):
        for seed in range(5):
            data = np.random.default_rng(seed).normal(size=(10_000, 4))
            corr = correlation_matrix(data)
            off = corr[~np.eye(4, dtype=bool)]
            assert np.abs(off).max() < 0.05

    def test_constant_column_named(self):
        data = np.ones((50, 3))
        data[:, 0] = np.arange(50)
        with pytest.raises(ValueError, match="column 1"):
            correlation_matrix(data)

    def test_diagonal_and_symmetry(self):
        data = np.random.default_rng(2).normal(size=(200, 5))
        corr = correlation_matrix(data)
        assert np.array_equal(np.diagonal(corr), np.ones(5))
        assert np.allclose(corr, corr.T)


class TestCorrelationThreshold:
    def test_large_sample_value(self):
        eps = correlation_threshold(10_000, 0.05)
        assert 0.0195 <= eps <= 0.0197

    def test_smallest_sample_value(self):
        # t_{0.975, 2} = 4.302652729..., eps = t / sqrt(2 + t^2)
        eps = correlation_threshold(4, 0.05)
        assert eps == pytest.approx(0.95, abs=1e-9)

    def test_alpha_near_one_vanishes(self):
        assert correlation_threshold(100, 0.9999999) < 1e-3

    def test_matches_scipy_quantiles(self):
        for m in (4, 7, 30, 1000, 10_000):
            for alpha in (0.01, 0.05, 0.2, 0.5):
                t_ref = stats.t.ppf(1 - alpha / 2, m - 2)
                expected = t_ref / np.sqrt(m - 2 + t_ref**2)
                assert correlation_threshold(m, alpha) == pytest.approx(expected, abs=1e-9)

    def test_argument_errors(self):
        with pytest.raises(ValueError):
            correlation_threshold(3, 0.05)
        with pytest.raises(ValueError):
            correlation_threshold(100, 0.0)

    def test_quantile_matches_scipy_on_grid(self):
        for df in (2, 5, 28, 998):
            for q in (0.55, 0.75, 0.9, 0.975, 0.995):
                mine = _student_t_quantile(q, df)
                ref = stats.t.ppf(q, df)
                assert mine == pytest.approx(ref, abs=1e-9, rel=1e-9)


class TestEstimateRelativeOrder:
    def test_single_column(self):
        data = np.random.default_rng(3).normal(size=(100, 1))
        assert estimate_relative_order(data, 0.05).tolist() == [0]

    def test_collider_estimated_last(self):
        hits = 0
        seeds = 100
        for seed in range(seeds):
            data = sample_observations(collider_scm(), 100_000, "raw",
                                       Rng(1000 + seed))
            order = estimate_relative_order(data, 0.05)
            counts = estimate_relative_counts(data, 0.05)
            assert counts[2] == 3  # both true links essentially never missed
            hits += order[-1] == 2
        assert hits >= 99

    def test_independent_columns_identity(self):
        data = Rng(57).generator.normal(size=(5000, 4))
        counts = estimate_relative_counts(data, 0.05)
        assert counts.tolist() == [1, 1, 1, 1]
        assert estimate_relative_order(data, 0.05).tolist() == [0, 1, 2, 3]

    def test_scale_invariance(self):
        data = sample_observations(collider_scm(), 5000, "raw", Rng(8))
        scaled = data * np.array([3.0, -0.2, 40.0])
        a = estimate_relative_order(data, 0.05)
        b = estimate_relative_order(scaled, 0.05)
        assert np.array_equal(a, b)


class TestCriterionOrder:
    def test_basic(self):
        assert criterion_order([3.0, 1.0, 2.0]).tolist() == [1, 2, 0]

    def test_all_equal_identity(self):
        assert criterion_order([5.0, 5.0, 5.0]).tolist() == [0, 1, 2]

    def test_stable_tie_break(self):
        assert criterion_order([0.2, 0.1, 0.1]).tolist() == [1, 2, 0]

    def test_rejects_non_finite(self):
        with pytest.raises(ValueError):
            criterion_order([1.0, np.inf])


class TestOls:
    def test_exact_linear(self):
        x = np.linspace(-1, 1, 50)[:, None]
        beta = ols(x, 2 * x[:, 0])
        assert beta == pytest.approx([2.0])

    def test_orthogonal_target(self):
        X = np.zeros((4, 1))
        X[0, 0] = 1.0
        y = np.array([0.0, 1.0, 0.0, 0.0])
        assert ols(X, y) == pytest.approx([0.0])

    def test_matches_pseudoinverse(self):
        gen = np.random.default_rng(4)
        X = gen.normal(size=(200, 6))
        y = gen.normal(size=200)
        assert np.abs(ols(X, y) - np.linalg.pinv(X) @ y).max() < 1e-8

    def test_rank_deficient_fallback(self):
        x = np.random.default_rng(5).normal(size=100)
        X = np.column_stack([x, x])
        with pytest.warns(NumericalFallbackWarning):
            beta = ols(X, 3 * x)
        assert np.isfinite(beta).all()
        assert beta.sum() == pytest.approx(3.0, abs=1e-3)

    def test_empty_predictors(self):
        assert ols(np.zeros((10, 0)), np.ones(10)).size == 0


class TestAdaptiveLassoBic:
    def test_pure_noise_selects_empty(self):
        seeds = 40
        empties = 0
        for seed in range(seeds):
            gen = np.random.default_rng(9000 + seed)
            X = gen.normal(size=(10_000, 5))
            y = gen.normal(size=10_000)
            beta = adaptive_lasso_bic(X, y, ols(X, y))
            empties += not beta.any()
        assert empties >= 0.95 * seeds

    def test_single_predictor_recovery(self):
        for seed in range(10):
            gen = np.random.default_rng(100 + seed)
            x = gen.normal(size=5000)
            y = 0.8 * x + 0.1 * gen.normal(size=5000)
            beta = adaptive_lasso_bic(x[:, None], y, ols(x[:, None], y))
            assert beta[0] != 0
            assert abs(beta[0] - 0.8) < 0.08

    def test_lambda_max_gives_zero(self):
        gen = np.random.default_rng(6)
        X = gen.normal(size=(500, 4))
        y = X @ np.array([1.0, 0.5, 0.0, -0.3]) + gen.normal(size=500)
        b_ols = ols(X, y)
        pen = 1.0 / np.abs(b_ols)
        rhs = X.T @ y
        lam_max = float(np.max(2.0 * np.abs(rhs) / pen))
        beta = np.zeros(4)
        prod = np.zeros(4)
        _coordinate_descent(X.T @ X, rhs, beta, prod, lam_max, pen)
        assert not beta.any()

    def test_zero_penalty_recovers_ols_on_support(self):
        gen = np.random.default_rng(7)
        X = gen.normal(size=(300, 4))
        y = X @ np.array([1.0, -2.0, 0.5, 0.0]) + gen.normal(size=300)
        b_ols = ols(X, y)
        beta = np.zeros(4)
        prod = np.zeros(4)
        _coordinate_descent(X.T @ X, X.T @ y, beta, prod, 0.0, 1.0 / np.abs(b_ols))
        assert np.abs(beta - b_ols).max() < 1e-6

    def test_zero_ols_coefficients_excluded(self):
        gen = np.random.default_rng(8)
        X = gen.normal(size=(100, 3))
        y = X[:, 0] + gen.normal(size=100)
        beta = adaptive_lasso_bic(X, y, np.array([1.0, 0.0, 0.5]))
        assert beta[1] == 0.0

    def test_rejects_non_finite(self):
        with pytest.raises(ValueError):
            adaptive_lasso_bic(np.array([[np.nan]]), np.ones(1), np.ones(1))


class TestSortNRegress:
    def test_single_node_empty(self):
        data = np.random.default_rng(9).normal(size=(100, 1))
        est = sort_n_regress(data, [0])
        assert est.num_edges == 0

    def test_chain_forward_order(self):
        hits = 0
        for seed in range(20):
            scm = LinearScm(Dag.from_edges(2, [(0, 1)]), [[0, 1.0], [0, 0]], [1, 1])
            data = sample_observations(scm, 10_000, "raw", Rng(300 + seed))
            est = sort_n_regress(data, [0, 1])
            hits += est.adj[0, 1] and est.num_edges == 1
        assert hits >= 19

    def test_chain_reversed_order(self):
        hits = 0
        for seed in range(20):
            scm = LinearScm(Dag.from_edges(2, [(0, 1)]), [[0, 1.0], [0, 0]], [1, 1])
            data = sample_observations(scm, 10_000, "raw", Rng(300 + seed))
            est = sort_n_regress(data, [1, 0])
            hits += est.adj[1, 0] and est.num_edges == 1
        assert hits >= 19

    def test_respects_order_and_acyclic(self):
        g = sample_er_dag(12, 2.0, Rng(10))
        data = sample_observations(sample_params(g, Rng(11)), 2000, "sscm", Rng(12))
        order = Rng(13).generator.permutation(12)
        est = sort_n_regress(data, order)
        pos = np.empty(12, dtype=int)
        pos[order] = np.arange(12)
        for i, j in est.edges():
            assert pos[int(i)] < pos[int(j)]

    def test_oracle_order_recovers_supergraph(self):
        # graph with strictly increasing relatives: regression along the
        # oracle order keeps every true edge
        g = Dag.from_edges(5, [(0, 2), (1, 2), (2, 4), (3, 4)])
        assert sortability(g, rel_criterion(g)) == 1.0
        scm = LinearScm(g, np.where(g.adj, 0.9, 0.0), np.full(5, 0.7))
        data = sample_observations(scm, 20_000, "raw", Rng(14))
        est = sort_n_regress(data, criterion_order(rel_criterion(g)))
        assert (est.adj | g.adj == est.adj).all()

    def test_rejects_bad_order(self):
        with pytest.raises(ValueError):
            sort_n_regress(np.ones((10, 2)), [0, 0])


class TestRelSortNRegress:
    def test_collider_recovery(self):
        hits = 0
        for seed in range(20):
            data = sample_observations(collider_scm(), 100_000, "raw", Rng(500 + seed))
            est = rel_sort_n_regress(data, alpha=0.05)
            hits += est.adj[0, 2] and est.adj[1, 2] and est.num_edges == 2
        assert hits >= 18

    def test_independent_columns_empty(self):
        hits = 0
        for seed in range(20):
            data = Rng(700 + seed).generator.normal(size=(10_000, 4))
            est = rel_sort_n_regress(data, alpha=0.05)
            hits += est.num_edges == 0
        assert hits >= 18

    def test_single_column(self):
        data = np.random.default_rng(15).normal(size=(100, 1))
        assert rel_sort_n_regress(data).num_edges == 0
