import numpy as np
import pytest

from cvsteer import (
    ProtocolParams,
    ShotBatch,
    build_network_state,
    compare_covariance,
    estimate_covariance,
    simulate_shots,
)
from conftest import three_user_params, two_user_params


class TestSimulateShots:
    def test_deterministic_given_seed(self):
        params = two_user_params(0.8)
        a = simulate_shots(params, "final_two_user", 5000, seed=42)
        b = simulate_shots(params, "final_two_user", 5000, seed=42)
        np.testing.assert_array_equal(a.quads, b.quads)

    def test_different_seeds_differ(self):
        params = two_user_params(0.8)
        a = simulate_shots(params, "final_two_user", 1000, seed=1)
        b = simulate_shots(params, "final_two_user", 1000, seed=2)
        assert not np.array_equal(a.quads, b.quads)

    def test_prefix_stability_across_lengths(self):
        # block-wise substreams: a longer run extends, not reshuffles, a short one
        params = two_user_params(0.8)
        short = simulate_shots(params, "final_two_user", 1000, seed=7)
        long = simulate_shots(params, "final_two_user", 4000, seed=7)
        np.testing.assert_array_equal(long.quads[:1000], short.quads)

    def test_shapes_and_labels(self):
        params = three_user_params(0.9)
        batch = simulate_shots(params, "pre_david", 100, seed=3)
        assert batch.labels == ("A", "B", "C2", "D0")
        assert batch.quads.shape == (100, 8)

    def test_strong_noise_anticorrelates_relay(self):
        params = two_user_params(1.0).replace(v_dis=100.0)
        batch = simulate_shots(params, "pre_bob", 20000, seed=5)
        cov = estimate_covariance(batch)
        assert cov[2, 4] < 0  # x_B0 against x_C1

    def test_dead_channels_decorrelate(self):
        params = two_user_params(0.0)
        batch = simulate_shots(params, "final_two_user", 40000, seed=11)
        cov = estimate_covariance(batch)
        corr = cov[0, 2] / np.sqrt(cov[0, 0] * cov[2, 2])
        assert abs(corr) < 3.0 / np.sqrt(batch.n_shots)

    def test_too_few_shots(self):
        with pytest.raises(ValueError):
            simulate_shots(two_user_params(1.0), "final_two_user", 1, seed=0)

    def test_stage_validation(self):
        with pytest.raises(ValueError):
            simulate_shots(two_user_params(1.0), "final_three_user", 100, seed=0)
        with pytest.raises(ValueError):
            simulate_shots(two_user_params(1.0), "nope", 100, seed=0)


class TestEstimateCovariance:
    def test_constant_batch_gives_zero(self):
        batch = ShotBatch(("A",), np.ones((50, 2)), seed=0)
        np.testing.assert_allclose(estimate_covariance(batch), 0.0, atol=1e-15)

    def test_vacuum_network(self):
        params = ProtocolParams(users="two", v_s=1.0, v_a=1.0, v_dis=0.0)
        batch = simulate_shots(params, "final_two_user", 50000, seed=9)
        est = estimate_covariance(batch)
        assert np.abs(est - np.eye(4)).max() < 5.0 / np.sqrt(batch.n_shots)

    def test_recovers_analytic_covariance(self):
        params = three_user_params(0.7)
        batch = simulate_shots(params, "final_three_user", 200000, seed=13)
        est = estimate_covariance(batch)
        analytic = build_network_state(params, "final_three_user").cov
        assert np.abs(est - analytic).max() < 0.03

    def test_degenerate_batch_rejected(self):
        batch = ShotBatch(("A",), np.ones((1, 2)), seed=0)
        with pytest.raises(ValueError):
            estimate_covariance(batch)


class TestCompareCovariance:
    def test_self_comparison_clean(self):
        cov = build_network_state(two_user_params(1.0), "final_two_user").cov
        report = compare_covariance(cov, cov, 1000)
        assert report.max_abs_deviation == 0.0
        assert report.flagged == ()

    def test_corrupted_element_flagged(self):
        params = two_user_params(1.0)
        batch = simulate_shots(params, "final_two_user", 100000, seed=21)
        est = estimate_covariance(batch)
        corrupted = build_network_state(params, "final_two_user").cov.copy()
        corrupted[0, 2] += 0.5
        corrupted[2, 0] += 0.5
        report = compare_covariance(est, corrupted, batch.n_shots)
        assert (0, 2) in report.flagged

    def test_statistical_agreement(self):
        params = two_user_params(0.85)
        batch = simulate_shots(params, "final_two_user", 200000, seed=23)
        est = estimate_covariance(batch)
        analytic = build_network_state(params, "final_two_user").cov
        report = compare_covariance(est, analytic, batch.n_shots)
        assert report.flagged == ()
        assert float(report.z_scores.max()) < 5.0

    def test_xp_cross_terms_consistent_with_zero(self):
        params = three_user_params(0.6)
        batch = simulate_shots(params, "final_three_user", 150000, seed=29)
        est = estimate_covariance(batch)
        analytic = build_network_state(params, "final_three_user").cov
        report = compare_covariance(est, analytic, batch.n_shots)
        assert float(np.abs(report.z_scores[0::2, 1::2]).max()) < 5.0

    def test_shape_mismatch(self):
        with pytest.raises(ValueError):
            compare_covariance(np.eye(4), np.eye(6), 100)

    def test_small_sample_does_not_crash(self):
        params = two_user_params(1.0)
        batch = simulate_shots(params, "final_two_user", 10, seed=31)
        est = estimate_covariance(batch)
        analytic = build_network_state(params, "final_two_user").cov
        report = compare_covariance(est, analytic, batch.n_shots)
        assert report.max_abs_deviation > 0


def test_million_shot_three_user_run_within_five_sigma():
    params = three_user_params(1.0)
    batch = simulate_shots(params, "final_three_user", 1_000_000, seed=20240817)
    est = estimate_covariance(batch)
    analytic = build_network_state(params, "final_three_user").cov
    report = compare_covariance(est, analytic, batch.n_shots)
    assert report.flagged == ()


def test_convergence_rate_halves_with_quadrupled_shots():
    # averaged over independent seeds the max deviation should scale ~1/sqrt(n)
    params = two_user_params(1.0)
    analytic = build_network_state(params, "final_two_user").cov
    ratios = []
    for seed in (101, 202, 303, 404, 505):
        d_small = np.abs(estimate_covariance(
            simulate_shots(params, "final_two_user", 100_000, seed)) - analytic).max()
        d_large = np.abs(estimate_covariance(
            simulate_shots(params, "final_two_user", 400_000, seed + 1)) - analytic).max()
        ratios.append(d_small / d_large)
    assert 1.6 <= np.mean(ratios) <= 2.6
