import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from mpdport.errors import BisectionRangeExhausted, TargetBelowMinimumVariance
from mpdport.portfolio import (
    PortfolioProblem,
    efficient_frontier,
    min_variance,
    optimal_weights,
    optimal_weights_no_short,
    portfolio_for_variance,
    portfolio_stats,
)
from mpdport.pseudodistance import ModelParams


def random_params(rng, n, scale=1.0):
    a = rng.standard_normal((n, n))
    return ModelParams(rng.standard_normal(n) * 0.3, scale * (a @ a.T / n + 0.2 * np.eye(n)))


def utility(p, params, lam):
    r, s = portfolio_stats(p, params)
    return r - lam / 2 * s


class TestOptimalWeights:
    @pytest.mark.parametrize("lam", [0.01, 1.0, 250.0])
    def test_symmetric_assets(self, lam):
        p = optimal_weights(ModelParams([0.1, 0.1], np.eye(2)), lam)
        np.testing.assert_allclose(p, [0.5, 0.5], atol=1e-14)

    def test_single_asset(self):
        for lam in (0.1, 3.0):
            np.testing.assert_allclose(optimal_weights(ModelParams([0.4], [[2.0]]), lam), [1.0])

    def test_line_grid_oracle(self):
        params = ModelParams([0.2, 0.1], np.eye(2))
        grid = np.linspace(-2, 3, 500001)
        values = 0.2 * grid + 0.1 * (1 - grid) - 0.5 * (grid**2 + (1 - grid) ** 2)
        best = grid[np.argmax(values)]
        p = optimal_weights(params, 1.0)
        np.testing.assert_allclose(p, [0.55, 0.45], atol=1e-14)
        assert p[0] == pytest.approx(best, abs=1e-5)

    @settings(max_examples=60, deadline=None)
    @given(st.integers(2, 8), st.floats(0.05, 50.0), st.integers(0, 2**32 - 1))
    def test_optimality(self, n, lam, seed):
        rng = np.random.default_rng(seed)
        params = random_params(rng, n)
        p = optimal_weights(params, lam)
        assert p.sum() == pytest.approx(1.0, abs=1e-12)
        # stationarity: mu - lam Sigma p is a multiple of e
        grad = params.mu - lam * params.sigma @ p
        assert np.ptp(grad) < 1e-9 * (1 + np.max(np.abs(grad)))
        best = utility(p, params, lam)
        for _ in range(20):
            d = rng.standard_normal(n)
            d -= d.mean()
            assert utility(p + 1e-3 * d, params, lam) <= best + 1e-15

    def test_rejects_nonpositive_lambda(self):
        params = ModelParams([0.1, 0.2], np.eye(2))
        for lam in (0.0, -1.0, np.inf, np.nan):
            with pytest.raises(ValueError):
                optimal_weights(params, lam)
        with pytest.raises(ValueError):
            PortfolioProblem(params, 0.0)


class TestNoShort:
    def test_interior_equals_unconstrained(self):
        params = ModelParams([0.3, -0.5], np.eye(2))
        np.testing.assert_allclose(optimal_weights(params, 1.0), [0.9, 0.1], atol=1e-14)
        np.testing.assert_allclose(optimal_weights_no_short(params, 1.0), [0.9, 0.1], atol=1e-12)

    def test_clamps_to_vertex(self):
        params = ModelParams([0.5, -0.5], np.eye(2))
        np.testing.assert_allclose(optimal_weights(params, 0.2), [3.0, -2.0], atol=1e-12)
        grid = np.arange(0.0, 1.0 + 1e-12, 1e-4)
        values = 0.5 * grid - 0.5 * (1 - grid) - 0.1 * (grid**2 + (1 - grid) ** 2)
        p = optimal_weights_no_short(params, 0.2)
        np.testing.assert_allclose(p, [1.0, 0.0], atol=1e-12)
        assert p[0] == pytest.approx(grid[np.argmax(values)], abs=1e-4)

    def test_equal_assets_uniform(self):
        params = ModelParams(np.full(5, 0.07), np.eye(5))
        np.testing.assert_allclose(optimal_weights_no_short(params, 2.0), 0.2, atol=1e-12)

    def test_simplex_brute_force(self):
        rng = np.random.default_rng(0)
        step = 0.005
        ticks = np.arange(0.0, 1.0 + 1e-12, step)
        a, b = np.meshgrid(ticks, ticks, indexing="ij")
        keep = a + b <= 1 + 1e-12
        simplex = np.column_stack([a[keep], b[keep], 1 - a[keep] - b[keep]])
        for _ in range(10):
            params = random_params(rng, 3)
            lam = float(rng.uniform(0.2, 5.0))
            values = simplex @ params.mu - lam / 2 * np.einsum(
                "ki,ij,kj->k", simplex, params.sigma, simplex)
            p = optimal_weights_no_short(params, lam)
            assert np.all(p >= 0) and p.sum() == pytest.approx(1.0, abs=1e-12)
            assert utility(p, params, lam) >= values.max() - 1e-12
            assert np.max(np.abs(p - simplex[np.argmax(values)])) < 3 * step

    @settings(max_examples=60, deadline=None)
    @given(st.integers(2, 12), st.floats(0.01, 100.0), st.integers(0, 2**32 - 1))
    def test_kkt(self, n, lam, seed):
        rng = np.random.default_rng(seed)
        params = random_params(rng, n)
        p = optimal_weights_no_short(params, lam)
        assert np.all(p >= 0)
        assert p.sum() == pytest.approx(1.0, abs=1e-10)
        grad = params.mu - lam * params.sigma @ p
        active = p > 1e-12
        kappa = grad[active].mean()
        assert np.max(np.abs(grad[active] - kappa)) < 1e-8
        assert np.all(grad[~active] <= kappa + 1e-8)

    def test_problem_dispatch(self):
        params = ModelParams([0.5, -0.5], np.eye(2))
        np.testing.assert_allclose(PortfolioProblem(params, 0.2).solve(), [3.0, -2.0])
        np.testing.assert_allclose(PortfolioProblem(params, 0.2, allow_short=False).solve(),
                                   [1.0, 0.0], atol=1e-12)


class TestStats:
    def test_direct(self):
        r, s = portfolio_stats([0.5, 0.5], ModelParams([0.1, 0.1], np.eye(2)))
        assert r == pytest.approx(0.1) and s == pytest.approx(0.5)

    def test_unit_vector(self):
        params = ModelParams([0.3, -0.1], [[2.0, 0.4], [0.4, 1.0]])
        assert portfolio_stats([1.0, 0.0], params) == pytest.approx((0.3, 2.0))

    def test_loop_oracle(self):
        rng = np.random.default_rng(1)
        params = random_params(rng, 2)
        p = rng.standard_normal(2)
        r = sum(p[i] * params.mu[i] for i in range(2))
        s = sum(p[i] * params.sigma[i, j] * p[j] for i in range(2) for j in range(2))
        got = portfolio_stats(p, params)
        assert got[0] == pytest.approx(r, abs=1e-14)
        assert got[1] == pytest.approx(s, abs=1e-14)


class TestFrontier:
    def test_single_asset(self):
        pts = efficient_frontier(ModelParams([0.2], [[0.3]]), [1.0, 5.0, 0.1])
        for pt in pts:
            assert (pt.expected_return, pt.variance) == pytest.approx((0.2, 0.3))

    def test_sorted_and_monotone(self):
        rng = np.random.default_rng(2)
        params = random_params(rng, 5)
        lambdas = rng.uniform(0.1, 100, 40)
        pts = efficient_frontier(params, lambdas)
        lams = [pt.lam for pt in pts]
        assert lams == sorted(lams)
        var = np.array([pt.variance for pt in pts])
        ret = np.array([pt.expected_return for pt in pts])
        assert np.all(np.diff(var) <= 1e-14)
        assert np.all(np.diff(ret) <= 1e-14)
        for pt in pts:
            assert pt.weights.sum() == pytest.approx(1.0, abs=1e-12)

    def test_no_short_monotone(self):
        rng = np.random.default_rng(3)
        params = random_params(rng, 6)
        pts = efficient_frontier(params, np.geomspace(0.05, 500, 30), allow_short=False)
        var = np.array([pt.variance for pt in pts])
        assert np.all(np.diff(var) <= 1e-12)
        assert all(np.all(pt.weights >= 0) for pt in pts)

    def test_empty_grid(self):
        with pytest.raises(ValueError):
            efficient_frontier(ModelParams([0.1], [[1.0]]), [])

    def test_min_variance(self):
        params = ModelParams([0.2, 0.1], [[1.0, 0.0], [0.0, 3.0]])
        pt = min_variance(params)
        np.testing.assert_allclose(pt.weights, [0.75, 0.25])
        assert pt.variance == pytest.approx(0.75)


class TestPortfolioForVariance:
    def test_grid_scan_oracle(self):
        params = ModelParams([0.2, 0.1], np.eye(2))
        pt = portfolio_for_variance(params, 0.6)
        lambdas = np.linspace(0.1, 1.0, 900001)
        # two-asset closed form written out independently
        first = 0.5 + 0.05 / lambdas
        variance = first**2 + (1 - first) ** 2
        k = np.argmin(np.abs(variance - 0.6))
        assert pt.lam == pytest.approx(lambdas[k], abs=1e-4)
        np.testing.assert_allclose(pt.weights, [first[k], 1 - first[k]], atol=1e-4)
        assert pt.lam == pytest.approx(np.sqrt(0.05), abs=1e-4)
        assert abs(pt.variance - 0.6) / 0.6 < 1e-6

    def test_self_consistency(self):
        rng = np.random.default_rng(4)
        for allow_short in (True, False):
            params = random_params(rng, 4)
            for lam0 in (0.3, 4.0, 60.0):
                target = PortfolioProblem(params, lam0, allow_short).solve()
                s0 = portfolio_stats(target, params)[1]
                if s0 <= min_variance(params, allow_short).variance * (1 + 1e-9):
                    continue
                pt = portfolio_for_variance(params, s0, allow_short=allow_short, rtol=1e-10)
                np.testing.assert_allclose(pt.weights, target, atol=1e-6)

    def test_below_minimum(self):
        params = ModelParams([0.2, 0.1], np.eye(2))
        with pytest.raises(TargetBelowMinimumVariance):
            portfolio_for_variance(params, 0.4)
        with pytest.raises(TargetBelowMinimumVariance):
            portfolio_for_variance(params, 0.5)

    def test_range_exhausted(self):
        # the variance at lambda = 1e-4 is far below this target
        params = ModelParams([0.2, 0.1], np.eye(2))
        with pytest.raises(BisectionRangeExhausted):
            portfolio_for_variance(params, 1e9)
