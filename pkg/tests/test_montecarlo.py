import math

import numpy as np
import pytest

from mpdport import linalg as la
from mpdport.errors import DimensionMismatch
from mpdport.estimators import EstimatorConfig, mle
from mpdport.montecarlo import (
    MseTable,
    SimulationScenario,
    equicorrelated,
    mse_hat,
    run_study,
    sample_contaminated,
)
from mpdport.pseudodistance import ModelParams


class TestScenario:
    def test_standard_layout(self):
        sc = SimulationScenario.standard(3, 30, 0.1)
        np.testing.assert_array_equal(sc.core.mu, np.zeros(3))
        np.testing.assert_allclose(sc.core.sigma, [[1, .2, .2], [.2, 1, .2], [.2, .2, 1]])
        np.testing.assert_array_equal(sc.contaminant.mu, np.full(3, -4.0))
        np.testing.assert_allclose(sc.contaminant.sigma, 4 * sc.core.sigma)
        assert sc.n_contaminated == 3

    def test_round_half_up(self):
        assert SimulationScenario.standard(2, 25, 0.1).n_contaminated == 3
        assert SimulationScenario.standard(2, 20, 0.05).n_contaminated == 1
        assert SimulationScenario.standard(2, 20, 0.0).n_contaminated == 0

    @pytest.mark.parametrize("kwargs", [dict(eps=1.0), dict(eps=-0.1), dict(t=2),
                                        dict(n_s=0)])
    def test_invalid(self, kwargs):
        base = dict(n=2, t=20, eps=0.1)
        base.update(kwargs)
        with pytest.raises(ValueError):
            SimulationScenario.standard(**base)

    def test_dimension_mismatch(self):
        with pytest.raises(DimensionMismatch):
            SimulationScenario(2, 20, 0.1, ModelParams(np.zeros(3), np.eye(3)),
                               ModelParams(np.zeros(2), np.eye(2)))


class TestSampling:
    def test_deterministic(self):
        sc = SimulationScenario.standard(2, 50, 0.1, seed=9)
        a, b = sample_contaminated(sc, 4), sample_contaminated(sc, 4)
        np.testing.assert_array_equal(a, b)
        assert not np.array_equal(a, sample_contaminated(sc, 5))
        other = SimulationScenario.standard(2, 50, 0.1, seed=10)
        assert not np.array_equal(a, sample_contaminated(other, 4))

    def test_no_contamination(self):
        sc = SimulationScenario.standard(2, 200, 0.0)
        x = sample_contaminated(sc, 0)
        assert x.shape == (200, 2)
        # contaminant rows sit near -4; none should appear
        assert np.all(x.mean(axis=1) > -3.5)

    def test_contaminated_count(self):
        sc = SimulationScenario.standard(2, 1000, 0.2, covariance=0.0, inflation=1e-6)
        x = sample_contaminated(sc, 0)
        assert np.sum(np.all(np.abs(x + 4.0) < 0.01, axis=1)) == 200

    def test_law_of_large_numbers(self):
        t = 10**5
        sc = SimulationScenario.standard(2, t, 0.0)
        x = sample_contaminated(sc, 0)
        sigma0 = equicorrelated(2)
        assert np.all(np.abs(x.mean(axis=0)) < 4 * np.sqrt(1 / t))
        cov = np.cov(x, rowvar=False, bias=True)
        for i in range(2):
            for j in range(2):
                # var of X_i X_j for a centred normal
                se = np.sqrt((sigma0[i, i] * sigma0[j, j] + sigma0[i, j] ** 2) / t)
                assert abs(cov[i, j] - sigma0[i, j]) < 4 * se


class TestMseHat:
    def test_truth_is_zero(self):
        truth = ModelParams([0.0, 1.0], [[1.0, 0.2], [0.2, 2.0]])
        assert mse_hat([(truth.mu, truth.sigma)], truth) == 0.0

    def test_unit_displacement(self):
        truth = ModelParams([0.0, 1.0, 2.0], np.eye(3))
        assert mse_hat([(truth.mu + [1, 0, 0], truth.sigma)], truth) == 1.0

    def test_loop_oracle(self):
        rng = np.random.default_rng(0)
        truth = ModelParams([0.1, -0.2], equicorrelated(2))
        ests = [mle(rng.standard_normal((15, 2))) for _ in range(30)]
        total = 0.0
        for e in ests:
            acc = sum((e.mu[i] - truth.mu[i]) ** 2 for i in range(2))
            for j in range(2):
                for i in range(j, 2):
                    acc += (e.sigma[i, j] - truth.sigma[i, j]) ** 2
            total += acc
        assert mse_hat(ests, truth) == pytest.approx(total / 30, abs=1e-12)

    def test_errors(self):
        truth = ModelParams([0.0, 0.0], np.eye(2))
        with pytest.raises(ValueError):
            mse_hat([], truth)
        with pytest.raises(DimensionMismatch):
            mse_hat([(np.zeros(3), np.eye(3))], truth)


class TestRunStudy:
    def test_deterministic(self):
        sc = SimulationScenario.standard(2, 20, 0.1, alphas=(0.0, 0.5), n_s=30, seed=3)
        a, b = run_study(sc), run_study(sc)
        assert a.rows == b.rows

    def test_alpha_zero_cell_is_mle(self):
        sc = SimulationScenario.standard(2, 20, 0.1, alphas=(0.0,), n_s=25, seed=4)
        ests = [mle(sample_contaminated(sc, r)) for r in range(25)]
        assert run_study(sc).mse(0.0) == pytest.approx(mse_hat(ests, sc.core), rel=1e-14)

    def test_callback_and_counts(self):
        sc = SimulationScenario.standard(2, 20, 0.1, alphas=(0.0, 0.5), n_s=12, seed=5)
        seen = []
        table = run_study(sc, EstimatorConfig(max_iter=3),
                          on_estimate=lambda a, r, x, est: seen.append((a, r)))
        assert len(seen) == 24
        row = table.row(0.5, n=2, t=20, eps=0.1)
        assert row.failures == 0 and row.nonconverged > 0
        assert table.row(0.0).nonconverged == 0

    def test_failures_excluded(self, monkeypatch):
        from mpdport import montecarlo
        from mpdport.errors import SingularScatter

        sc = SimulationScenario.standard(2, 20, 0.0, alphas=(0.0,), n_s=10, seed=8)
        failing = {sample_contaminated(sc, r).tobytes() for r in (2, 7)}
        real = montecarlo.mpd_estimate

        def flaky(x, config):
            if x.tobytes() in failing:
                raise SingularScatter("forced")
            return real(x, config)

        monkeypatch.setattr(montecarlo, "mpd_estimate", flaky)
        row = run_study(sc).row(0.0)
        kept = [mle(sample_contaminated(sc, r)) for r in range(10) if r not in (2, 7)]
        assert row.failures == 2
        assert row.mse == pytest.approx(mse_hat(kept, sc.core), rel=1e-14)

    def test_lookup(self):
        table = MseTable()
        with pytest.raises(KeyError):
            table.row(0.1)

    @pytest.mark.parametrize("eps", [0.05, 0.1, 0.2])
    @pytest.mark.parametrize("t", [20, 200])
    def test_robust_beats_mle_under_contamination(self, eps, t):
        sc = SimulationScenario.standard(2, t, eps, alphas=(0.0, 0.2), n_s=100, seed=6)
        table = run_study(sc)
        assert table.mse(0.2) < table.mse(0.0)

    def test_mse_decreases_with_t(self):
        small = run_study(SimulationScenario.standard(2, 20, 0.0, alphas=(0.0,), n_s=200))
        large = run_study(SimulationScenario.standard(2, 200, 0.0, alphas=(0.0,), n_s=200))
        assert large.mse(0.0) < small.mse(0.0)
