#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""前瞻偏好：ξ、Z^u 封閉式、耗盡時間與 SDE 交叉驗證"""

from dataclasses import replace

import numpy as np
import pytest

from src.core.preferences import (
    build_preference_path, check_divergence, crosscheck_gap, discount_factor_path, omega_weight,
    time_preference_path, zu_closed_form, zu_sde_form,
)
from src.demographics import LinearRampSchedule, SteadyStateSchedule
from src.models.enums import OmegaKind
from src.models.errors import DivergenceError
from src.models.params import PreferenceParams, TimeGrid
from src.simulator import simulate_batch


class TestDeterministicWeights:
    def test_time_preference(self):
        prefs = PreferenceParams()
        z = time_preference_path(np.array([0.0, 10.0]), prefs)
        assert z[0] == prefs.z0
        assert z[1] == pytest.approx(1e-8 * np.exp(-0.3))

    def test_equal_weight(self):
        demo = LinearRampSchedule(0.3, 0.5, 40.0)
        assert omega_weight(20.0, demo, OmegaKind.EQUAL_WEIGHT) == 1.0

    def test_dr_ratio_weight(self):
        demo = LinearRampSchedule(0.3, 0.5, 40.0)
        omega = omega_weight(np.array([0.0, 40.0]), demo, OmegaKind.DR_RATIO)
        assert omega[0] == pytest.approx(1.0)
        assert omega[1] == pytest.approx(0.5 / 0.3)

    def test_dr_ratio_is_one_in_steady_state(self):
        omega = omega_weight(np.linspace(0, 40, 9), SteadyStateSchedule(0.3), OmegaKind.DR_RATIO)
        assert np.all(omega == 1.0)

    def test_theta_one_rejected(self):
        with pytest.raises(ValueError):
            PreferenceParams(theta=1.0)


class TestClosedForm:
    def test_initial_values(self, small_config):
        _, pref_path, _ = simulate_batch(small_config, range(4))
        assert np.all(pref_path.xi[0] == 1.0)
        np.testing.assert_allclose(pref_path.zu[0], small_config.prefs.zu0, rtol=1e-12)
        assert np.all(pref_path.depletion_integral[0] == 0.0)

    def test_depletion_time_is_first_crossing(self, depleting_config):
        _, pref_path, _ = simulate_batch(depleting_config, range(depleting_config.n_paths))
        grid = depleting_config.grid
        integral = pref_path.depletion_integral
        assert np.all(np.diff(integral, axis=0) >= 0.0)
        depleted = np.isfinite(pref_path.tau)
        assert depleted.any()
        for k in range(depleting_config.n_paths):
            idx = int(pref_path.tau_index[k])
            if depleted[k]:
                assert integral[idx, k] >= 1.0
                assert np.all(integral[:idx, k] < 1.0)
                assert pref_path.tau[k] == pytest.approx(grid.times()[idx])
                assert np.all(pref_path.zu[idx:, k] == 0.0)
                assert np.all(pref_path.zu[:idx, k] > 0.0)
            else:
                assert idx == grid.n_points
                assert np.all(pref_path.zu[:, k] > 0.0)

    def test_depletion_independent_of_initial_fund(self, depleting_config):
        a = simulate_batch(depleting_config, range(6))[1]
        b = simulate_batch(depleting_config.with_updates(f0=2.0 * depleting_config.f0), range(6))[1]
        assert np.array_equal(a.tau, b.tau)
        assert np.array_equal(a.zu, b.zu)

    def test_single_path_matches_batch(self, small_config):
        from src.simulator import run_single_path
        _, batch, _ = simulate_batch(small_config, [2])
        _, single, _ = run_single_path(small_config, 2)
        np.testing.assert_allclose(batch.zu[:, 0], single.zu, rtol=1e-13)
        np.testing.assert_allclose(batch.xi[:, 0], single.xi, rtol=1e-13)

    def test_linear_depletion_integral(self):
        # ξ ≡ 1、N^r ≡ 1、Z ≡ Z^u_0 = 1：D_t = t，τ = 1
        grid = TimeGrid(horizon_years=2.0, steps_per_year=4)
        prefs = replace(PreferenceParams(), theta=2.0, z0=1.0, zu0=1.0)
        ones = np.ones(grid.n_points)
        zu, integral, tau, tau_index = zu_closed_form(ones, ones, ones, ones, prefs, grid)
        np.testing.assert_allclose(integral, grid.times())
        assert tau == 1.0 and tau_index == 4
        assert zu[2] == pytest.approx(0.25)
        assert np.all(zu[4:] == 0.0)

    def test_discount_factor_without_sensitivities(self, small_config):
        market, _, _ = simulate_batch(small_config, range(3))
        config = small_config.with_updates(prefs=replace(small_config.prefs, delta=(0.0, 0.0, 0.0, 0.0)))
        xi = discount_factor_path(market, config.prefs, config.loadings, config.grid.dt)
        theta = config.prefs.theta
        # δ = 0：ln ξ 只剩 (1−θ)(r + η²/2θ) 的漂移
        drift = (1.0 - theta) * (market.r + market.eta ** 2 / (2.0 * theta))
        np.testing.assert_allclose(np.log(xi[1]), drift[0] * config.grid.dt, rtol=1e-12)
        assert np.all(xi[0] == 1.0)


class TestSdeCrossCheck:
    @staticmethod
    def _sde(config, indices):
        market, pref_path, _ = simulate_batch(config, indices)
        zu_sde = zu_sde_form(market, pref_path.n_retirees, pref_path.z, pref_path.omega,
                             config.prefs, config.loadings, config.grid)
        return pref_path, zu_sde

    def test_zu_sde_agrees_with_closed_form(self, base_config):
        pref_path, zu_sde = self._sde(base_config, range(6))
        gap, _ = crosscheck_gap(pref_path.zu, zu_sde, pref_path.tau_index, 0.9)
        assert gap < 0.01

    def test_fine_grid_agreement_on_depleting_paths(self, depleting_config):
        fine_config = depleting_config.with_updates(grid=TimeGrid(horizon_years=10.0, steps_per_year=240))
        fine, zu_fine = self._sde(fine_config, range(4))
        gap_fine, _ = crosscheck_gap(fine.zu, zu_fine, fine.tau_index, 0.9)
        assert gap_fine < 0.01

    def test_check_divergence_raises(self):
        reference = np.ones(11)
        candidate = reference.copy()
        candidate[3] = 1.5
        with pytest.raises(DivergenceError) as excinfo:
            check_divergence(reference, candidate, 11, tolerance=0.01)
        assert excinfo.value.step == 3
        assert excinfo.value.gap == pytest.approx(0.5)

    def test_gap_window_stops_before_depletion(self):
        reference = np.ones(11)
        candidate = reference.copy()
        candidate[9] = 3.0
        # τ 在索引 10，視窗為 [0, 9]
        assert crosscheck_gap(reference, candidate, 10, 0.9)[0] == pytest.approx(2.0)
        # τ 在索引 5，視窗為 [0, 4]
        assert crosscheck_gap(reference, candidate, 5, 0.9)[0] == 0.0


def test_build_preference_path_uses_schedule(bb_config):
    config = bb_config.with_updates(grid=TimeGrid(horizon_years=5.0, steps_per_year=12),
                                    prefs=replace(bb_config.prefs, omega_kind=OmegaKind.DR_RATIO))
    market, _, _ = simulate_batch(config, [0])
    pref_path = build_preference_path(market, config.demo, config.prefs, config.loadings, config.grid)
    assert pref_path.n_retirees[0] == pytest.approx(30.0)
    assert pref_path.omega[-1] == pytest.approx(config.demo.dr(5.0) / 0.3)


class TestDeterministicOracles:
    def test_depletion_time_matches_analytic_root(self):
        # ξ ≡ 1、N^r ≡ 1、Z = Z_0 e^{−βt}：D_t = (cθ/β)(1 − e^{−βt/θ})，c = (Z_0/Z^u_0)^{1/θ}
        grid = TimeGrid(horizon_years=20.0, steps_per_year=120)
        prefs = replace(PreferenceParams(), theta=4.0, beta=0.03, z0=1e-4, zu0=1.0)
        times = grid.times()
        ones = np.ones(grid.n_points)
        z = time_preference_path(times, prefs)
        _, integral, tau, _ = zu_closed_form(ones, ones, z, ones, prefs, grid)
        c = 0.1
        analytic = c * 4.0 / 0.03 * (1.0 - np.exp(-0.03 * times / 4.0))
        np.testing.assert_allclose(integral[1:], analytic[1:], rtol=1e-7)
        root = -(4.0 / 0.03) * np.log(1.0 - 0.03 / (c * 4.0))
        assert abs(tau - root) <= grid.dt

    def test_sde_matches_closed_form_in_deterministic_market(self, base_config):
        market_params = replace(base_config.market, sigma_nu=0.0, sigma_r=0.0, sigma_e=0.0,
                                b=base_config.market.r0)
        config = base_config.with_updates(
            market=market_params,
            prefs=replace(base_config.prefs, delta=(0.0, 0.0, 0.0, 0.0)),
            grid=TimeGrid(horizon_years=10.0, steps_per_year=1200),
        )
        market, pref_path, _ = simulate_batch(config, [0])
        assert np.all(market.r == market_params.r0)
        zu_sde = zu_sde_form(market, pref_path.n_retirees, pref_path.z, pref_path.omega,
                             config.prefs, config.loadings, config.grid)
        gap, _ = crosscheck_gap(pref_path.zu, zu_sde, pref_path.tau_index, 0.9)
        assert gap < 1e-6

    def test_dr_ratio_weight_lowers_buffer_utility(self, bb_config):
        equal = bb_config.with_updates(grid=TimeGrid(horizon_years=10.0, steps_per_year=24))
        weighted = equal.with_updates(prefs=replace(equal.prefs, omega_kind=OmegaKind.DR_RATIO))
        _, pref_equal, _ = simulate_batch(equal, range(6))
        _, pref_weighted, _ = simulate_batch(weighted, range(6))
        assert np.all(pref_weighted.zu <= pref_equal.zu * (1.0 + 1e-12))
        assert np.all(pref_weighted.tau <= pref_equal.tau)
