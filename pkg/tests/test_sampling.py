import math

import numpy as np
import pytest
from mpmath import mp, mpf

from manymt.errors import DataError, NumericError
from manymt.sampling import (
    DROConfig,
    DROWeights,
    chi2_divergence,
    dro_worst_case,
    sample_schedule,
    temperature_distribution,
)

from oracles import dro_grid_oracle


def mpmath_temperature(sizes, tau):
    mp.dps = 40
    ws = [mpf(s) ** (mpf(1) / mpf(tau)) for s in sizes]
    total = sum(ws)
    return [float(w / total) for w in ws]


class TestTemperatureDistribution:
    def test_tau_one_is_raw_proportions(self):
        dist = temperature_distribution([3, 1], 1.0)
        assert dist.probs.tolist() == [0.75, 0.25]

    def test_tau_inf_is_uniform(self):
        dist = temperature_distribution([977, 1, 42], math.inf)
        assert dist.probs.tolist() == [1 / 3, 1 / 3, 1 / 3]

    def test_closed_form_against_extended_precision(self):
        sizes = [1000, 10]
        dist = temperature_distribution(sizes, 1.0 / 0.3)
        expected = mpmath_temperature(sizes, 1.0 / 0.3)
        assert dist.probs == pytest.approx(expected, abs=1e-14)
        # the spec's worked example, to 4 decimals
        assert round(dist.probs[0], 4) == 0.7992
        assert round(dist.probs[1], 4) == 0.2008

    def test_normalization_property(self):
        rng = np.random.default_rng(42)
        for _ in range(1000):
            n = int(rng.integers(2, 16))
            sizes = rng.uniform(1, 1e9, n)
            tau = float(rng.uniform(0.5, 100))
            dist = temperature_distribution(sizes, tau)
            assert abs(float(dist.probs.sum()) - 1.0) <= 1e-12
            assert np.all(dist.probs >= 0)

    def test_max_prob_nonincreasing_in_tau(self):
        sizes = [5000, 800, 60, 3]
        peaks = [temperature_distribution(sizes, t).probs.max() for t in (1, 2, 5, 100)]
        assert all(a >= b - 1e-15 for a, b in zip(peaks, peaks[1:]))

    def test_rejects_nonpositive_sizes(self):
        with pytest.raises(DataError):
            temperature_distribution([10, 0], 2.0)
        with pytest.raises(DataError):
            temperature_distribution([10, -3], 2.0)
        with pytest.raises(DataError):
            temperature_distribution([10, 10], -1.0)


class TestChi2Divergence:
    def test_zero_iff_equal(self):
        p = np.array([0.2, 0.3, 0.5])
        assert chi2_divergence(p, p) == 0.0

    def test_hand_computed_point_mass(self):
        assert chi2_divergence([1.0, 0.0], [0.5, 0.5]) == pytest.approx(0.5, abs=1e-15)

    def test_permutation_equivariance(self):
        rng = np.random.default_rng(1)
        for _ in range(50):
            n = int(rng.integers(2, 7))
            p = rng.dirichlet(np.ones(n)) + 1e-3
            p /= p.sum()
            q = rng.dirichlet(np.ones(n))
            perm = rng.permutation(n)
            assert chi2_divergence(q, p) == pytest.approx(
                chi2_divergence(q[perm], p[perm]), rel=1e-12
            )

    def test_rejects_bad_inputs(self):
        with pytest.raises(DataError):
            chi2_divergence([0.5, 0.5], [1.0, 0.0])
        with pytest.raises(DataError):
            chi2_divergence([0.5, 0.5], [0.5, 0.25, 0.25])


class TestDROWorstCase:
    def test_rho_zero_returns_p_train_exactly(self):
        p = np.array([0.2, 0.5, 0.3])
        w = dro_worst_case(np.array([3.0, -1.0, 0.5]), DROConfig(rho=0.0, p_train=p))
        assert w.q.tolist() == p.tolist()
        assert w.divergence == 0.0

    def test_constant_losses_return_p_train_exactly(self):
        p = np.array([0.1, 0.6, 0.3])
        w = dro_worst_case(np.array([2.0, 2.0, 2.0]), DROConfig(rho=0.25, p_train=p))
        assert w.q.tolist() == p.tolist()

    def test_uniform_three_task_example_vs_grid(self):
        p = np.full(3, 1 / 3)
        e = np.array([1.0, 0.5, 0.0])
        w = dro_worst_case(e, DROConfig(rho=0.1, p_train=p))
        oracle_q, oracle_obj = dro_grid_oracle(e, p, 0.1)
        assert np.max(np.abs(w.q - oracle_q)) <= 1e-2
        assert abs(float(w.q @ e) - oracle_obj) <= 1e-4
        # closed form: q = p (1 + lambda (e - 0.5)), lambda = sqrt(2*0.1/(1/6))
        lam = math.sqrt(0.2 / (1 / 6))
        expected = p * (1 + lam * (e - 0.5))
        assert w.q == pytest.approx(expected, abs=1e-12)

    def test_feasibility_and_dominance_random(self):
        rng = np.random.default_rng(7)
        for _ in range(200):
            n = int(rng.integers(2, 9))
            p = rng.dirichlet(np.ones(n)) + 1e-4
            p /= p.sum()
            e = rng.normal(0, 2, n)
            rho = float(rng.choice([0.01, 0.1, 0.5, 2.0]))
            w = dro_worst_case(e, DROConfig(rho=rho, p_train=p))
            assert np.all(w.q >= 0)
            assert abs(float(w.q.sum()) - 1.0) <= 1e-10
            assert w.divergence <= rho + 1e-8
            assert float(w.q @ e) >= float(p @ e) - 1e-12

    def test_optimality_vs_grid_oracle(self):
        rng = np.random.default_rng(123)
        for trial in range(100):
            n = 2 + trial % 3
            rho = (0.01, 0.1, 0.5)[trial % 3]
            p = rng.dirichlet(np.ones(n)) + 1e-3
            p /= p.sum()
            e = rng.normal(0, 1, n)
            w = dro_worst_case(e, DROConfig(rho=rho, p_train=p))
            _, oracle_obj = dro_grid_oracle(e, p, rho)
            assert float(w.q @ e) >= oracle_obj - 1e-4

    def test_scale_equivariance(self):
        rng = np.random.default_rng(5)
        for _ in range(50):
            n = int(rng.integers(2, 6))
            p = rng.dirichlet(np.ones(n)) + 1e-3
            p /= p.sum()
            e = rng.normal(0, 1, n)
            w1 = dro_worst_case(e, DROConfig(rho=0.1, p_train=p))
            w2 = dro_worst_case(e * 37.5, DROConfig(rho=0.1, p_train=p))
            assert np.max(np.abs(w1.q - w2.q)) <= 1e-10
            assert w1.active_support == w2.active_support

    def test_clipping_produces_valid_support(self):
        p = np.array([0.8, 0.1, 0.1])
        e = np.array([0.0, 0.0, 10.0])
        w = dro_worst_case(e, DROConfig(rho=5.0, p_train=p))
        assert w.active_support == frozenset({2})
        assert w.q.tolist() == [0.0, 0.0, 1.0]
        assert w.divergence <= 5.0 + 1e-8

    def test_rejects_non_finite_losses(self):
        cfg = DROConfig(rho=0.1, p_train=np.array([0.5, 0.5]))
        with pytest.raises(NumericError):
            dro_worst_case(np.array([1.0, math.nan]), cfg)


class TestSampleSchedule:
    def test_point_mass(self):
        dist = temperature_distribution([5], 1.0, directions=["eng-zul"])
        assert sample_schedule(dist, 10, seed=4) == ["eng-zul"] * 10

    def test_empty_batch(self):
        dist = temperature_distribution([5, 2], 1.0)
        assert sample_schedule(dist, 0, seed=4) == []

    def test_determinism(self):
        dist = temperature_distribution([5, 2, 9], 2.0)
        assert sample_schedule(dist, 500, seed=11) == sample_schedule(dist, 500, seed=11)

    def test_uniform_frequencies(self):
        dist = temperature_distribution([7, 7, 7, 7], math.inf)
        draws = sample_schedule(dist, 100_000, seed=0)
        for d in range(4):
            freq = draws.count(d) / 100_000
            assert 0.24 <= freq <= 0.26

    def test_accepts_dro_weights(self):
        w = DROWeights(q=np.array([0.5, 0.5]), divergence=0.0)
        draws = sample_schedule(w, 100, seed=1)
        assert set(draws) <= {0, 1}
