#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""最適政策：p*、π*、F* 的性質、次佳政策與效用過程"""

from dataclasses import replace

import numpy as np
import pytest

from src.core.policy import (
    euler_fund_crosscheck, evaluate_utility_process, perturbed_policy_path, pure_investment_wealth,
)
from src.models.errors import UnboundedUtilityError
from src.models.params import TimeGrid
from src.simulator import (
    PensionSimulator, recalibrate_for_theta, run_pipeline, run_single_path, simulate_batch,
)


class TestOptimalPolicy:
    def test_pension_and_fund_bounds(self, depleting_config):
        _, _, policy = simulate_batch(depleting_config, range(depleting_config.n_paths))
        assert np.all(policy.p_star >= policy.p_min)
        assert np.all(policy.fund >= policy.k_bound)
        assert np.all(policy.p_min > 0)

    def test_initial_relative_surplus(self, small_config):
        _, _, policy = simulate_batch(small_config, range(3))
        rho0 = (policy.p_star[0] - policy.p_min[0]) / policy.p_min[0]
        np.testing.assert_allclose(rho0, 0.05, rtol=1e-12)
        np.testing.assert_allclose(policy.p_min[0], 19.5, rtol=1e-12)
        np.testing.assert_allclose(policy.fund[0], 585.0, rtol=1e-12)

    def test_initial_risky_fraction(self, small_config):
        _, _, policy = simulate_batch(small_config, range(3))
        # (ᵗLδ)^S = 0.14、η_0 = 0.04/√0.04 = 0.2
        np.testing.assert_allclose(policy.risky_fraction[0], 0.34 / (4.0 * 0.2), rtol=1e-12)

    def test_pure_payg_after_depletion(self, depleting_config):
        _, pref_path, policy = simulate_batch(depleting_config, range(depleting_config.n_paths))
        depleted = pref_path.depleted
        assert depleted.any()
        assert np.array_equal(policy.p_star[depleted], policy.p_min[depleted])
        assert np.all(policy.pi_star[depleted] == 0.0)
        assert np.array_equal(policy.fund[depleted], policy.k_bound[depleted])
        assert np.all(np.isnan(policy.risky_fraction[depleted]))
        assert np.all(np.isfinite(policy.risky_fraction[~depleted]))

    def test_initial_fund_does_not_move_tau_or_risky_fraction(self, small_config):
        a = simulate_batch(small_config, range(4))
        b = simulate_batch(small_config.with_updates(f0=1.5 * small_config.c0), range(4))
        assert np.array_equal(a[1].tau, b[1].tau)
        assert np.array_equal(a[2].risky_fraction, b[2].risky_fraction, equal_nan=True)
        np.testing.assert_allclose(b[2].fund, 1.5 * a[2].fund, rtol=1e-12)

    def test_risky_fraction_support_independent_of_fund_scale(self, depleting_config):
        # 門檻相對於 F_0 − 𝔎_0：微小的初始基金不會提早把比例標成 NaN
        indices = range(depleting_config.n_paths)
        reference = simulate_batch(depleting_config, indices)[2].risky_fraction
        for scale in (1e-8, 1e6):
            scaled = depleting_config.with_updates(f0=scale * depleting_config.f0)
            risky = simulate_batch(scaled, indices)[2].risky_fraction
            assert np.array_equal(np.isnan(risky), np.isnan(reference))
            np.testing.assert_allclose(risky, reference, rtol=1e-12)

    def test_surplus_identical_across_demographics_before_depletion(self, small_config, bb_config):
        bb = bb_config.with_updates(grid=small_config.grid, n_paths=small_config.n_paths)
        _, pref_ss, pol_ss = simulate_batch(small_config, range(4))
        _, pref_bb, pol_bb = simulate_batch(bb, range(4))
        common = ~(pref_ss.depleted | pref_bb.depleted)
        assert common.any()
        assert np.array_equal(pol_ss.pension_surplus[common], pol_bb.pension_surplus[common])
        # 嬰兒潮的最低年金隨 DR 上升而下降
        assert np.all(pol_bb.p_min[1:] < pol_ss.p_min[1:])


class TestFundCrossCheck:
    def test_euler_fund_matches_closed_form(self, depleting_config):
        fine = depleting_config.with_updates(grid=TimeGrid(horizon_years=10.0, steps_per_year=240))
        market, pref_path, policy = simulate_batch(fine, range(4))
        fund = euler_fund_crosscheck(market, pref_path, fine.pension, fine.prefs, fine.loadings,
                                     fine.grid, fine.f0)
        assert fund[0] == pytest.approx(fine.f0)
        assert np.all(fund >= policy.k_bound)
        gaps = PensionSimulator(max_workers=1).crosscheck(fine, range(4), strict=False)
        assert gaps['fund'] < 0.01
        assert gaps['zu'] < 0.01

    def test_base_scenario_crosscheck_passes(self, base_config):
        gaps = PensionSimulator(max_workers=1).crosscheck(base_config, range(3), strict=True)
        assert set(gaps) == {'zu', 'fund'}


class TestPerturbedPolicy:
    def test_unit_multiplier_reproduces_optimum(self, small_config):
        market, pref_path, policy = simulate_batch(small_config, range(3))
        same = perturbed_policy_path(market, pref_path, policy, small_config.prefs, small_config.grid, 1.0)
        np.testing.assert_allclose(same.pension_surplus, policy.pension_surplus, rtol=1e-10)
        np.testing.assert_allclose(same.fund, policy.fund, rtol=1e-12)

    def test_larger_payout_drains_fund(self, small_config):
        market, pref_path, policy = simulate_batch(small_config, range(3))
        sub = perturbed_policy_path(market, pref_path, policy, small_config.prefs, small_config.grid, 1.1)
        np.testing.assert_allclose(sub.pension_surplus[0], 1.1 * policy.pension_surplus[0], rtol=1e-10)
        assert np.all(sub.fund[1:] < policy.fund[1:])
        assert np.all(sub.p_star >= sub.p_min)
        assert np.all(sub.fund >= sub.k_bound)


class TestUtilityProcess:
    def test_unbounded_after_depletion(self, depleting_config):
        _, pref_path, policy = simulate_batch(depleting_config, range(depleting_config.n_paths))
        assert pref_path.depleted.any()
        with pytest.raises(UnboundedUtilityError):
            evaluate_utility_process(policy, pref_path, depleting_config.prefs.theta,
                                     depleting_config.grid.dt)

    def test_initial_value(self, small_config):
        _, pref_path, policy = simulate_batch(small_config, range(2))
        values = evaluate_utility_process(policy, pref_path, 4.0, small_config.grid.dt)
        expected = small_config.prefs.zu0 * 585.0 ** -3.0 / -3.0
        np.testing.assert_allclose(values[0], expected, rtol=1e-12)


class TestMartingaleSuite:
    """θ = 0.5、5 年、N = 10,000：最適政策的效用過程為鞅，放大給付者為超鞅"""

    @staticmethod
    def _utility_samples(base_config, multiplier):
        config = recalibrate_for_theta(
            base_config.with_updates(prefs=replace(base_config.prefs, theta=0.5),
                                     grid=TimeGrid(horizon_years=5.0, steps_per_year=120)),
            0.05,
        )
        yearly = list(range(0, config.grid.n_points, config.grid.steps_per_year))
        samples = []
        for start in range(0, 10000, 1000):
            market, pref_path, policy = simulate_batch(config, range(start, start + 1000))
            if multiplier != 1.0:
                policy = perturbed_policy_path(market, pref_path, policy, config.prefs, config.grid,
                                               multiplier)
            values = evaluate_utility_process(policy, pref_path, config.prefs.theta, config.grid.dt)
            samples.append(values[yearly])
        return np.concatenate(samples, axis=1)

    @pytest.mark.slow
    def test_optimal_policy_is_martingale(self, base_config):
        values = self._utility_samples(base_config, 1.0)
        initial = values[0, 0]
        stderr = values.std(axis=1, ddof=1) / np.sqrt(values.shape[1])
        assert np.all(np.abs(values.mean(axis=1) - initial) <= 3.0 * stderr + 1e-12 * abs(initial))

    @pytest.mark.slow
    def test_inflated_pension_is_supermartingale(self, base_config):
        values = self._utility_samples(base_config, 1.1)
        means = values.mean(axis=1)
        stderr = values.std(axis=1, ddof=1) / np.sqrt(values.shape[1])
        assert np.all(np.diff(means) <= 3.0 * stderr[1:])
        optimal = self._utility_samples(base_config, 1.0)
        assert means[-1] < optimal.mean(axis=1)[-1]


def test_pure_investment_wealth_starts_at_surplus(small_config):
    market, _, _ = simulate_batch(small_config, range(5))
    wealth = pure_investment_wealth(market, small_config.prefs, small_config.loadings, 585.0,
                                    small_config.grid.dt)
    np.testing.assert_allclose(wealth[0], 585.0, rtol=1e-12)
    assert np.all(wealth > 0)


def test_theta_changes_risky_fraction(small_config):
    low = simulate_batch(small_config, range(2))[2]
    high = simulate_batch(small_config.with_updates(prefs=replace(small_config.prefs, theta=8.0)),
                          range(2))[2]
    np.testing.assert_allclose(high.risky_fraction[0], 0.5 * low.risky_fraction[0], rtol=1e-12)


class TestTruncatedVariance:
    """完全截斷把 ν 推到 0 時，η、ξ 與基金仍為有限值"""

    def test_forced_zero_variance_stays_finite(self, small_config):
        normals = np.zeros((small_config.grid.n_steps, 4))
        normals[10, 1] = -50.0
        market, pref_path, policy = run_pipeline(small_config, normals)
        assert market.nu.min() == 0.0
        assert np.all(pref_path.xi > 0.0)
        for series in (policy.p_star, policy.fund, policy.phi_star):
            assert np.all(np.isfinite(series))
        assert np.all(policy.fund >= policy.k_bound)

    def test_reported_full_size_path(self, base_config):
        config = base_config.with_updates(master_seed=20240101)
        market, pref_path, policy = run_single_path(config, 4727)
        assert np.all(np.isfinite(market.eta))
        assert np.all(pref_path.xi > 0.0)
        assert np.all(np.isfinite(policy.p_star))
        assert np.all(np.isfinite(policy.fund))
        assert not np.any(np.isinf(policy.risky_fraction))
