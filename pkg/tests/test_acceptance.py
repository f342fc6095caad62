#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""
完整重現測試（N = 10,000、每年 120 步）
耗時數分鐘，需要 --runslow
"""

import numpy as np
import pytest

from src.core.config import config_manager
from src.core.scenario_loader import load_preset
from src.models.enums import SweepParameter
from src.models.params import TimeGrid
from src.models.results import SweepSpec
from src.simulator import PensionSimulator

pytestmark = pytest.mark.slow


@pytest.fixture(scope='module')
def simulator():
    return PensionSimulator()


@pytest.fixture(scope='module')
def runs(simulator):
    """依預設名稱快取的完整執行結果"""
    cache = {}

    def get(name):
        if name not in cache:
            cache[name] = simulator.run_scenario(load_preset(name), label=name)
        return cache[name]
    return get


def _eair(bundle, t):
    return next(row for row in bundle.summary.eair_rows if row.t == t)


class TestEairPanel:
    def test_steady_state(self, runs):
        bundle = runs('table1_base')
        for t in (10.0, 20.0, 30.0):
            assert _eair(bundle, t).y_min == pytest.approx(0.02, abs=5e-4)
        assert _eair(bundle, 10.0).y_bf == pytest.approx(0.0309, abs=1.5e-3)

    def test_baby_boom(self, runs):
        bundle = runs('table1_bb')
        assert _eair(bundle, 10.0).y_min == pytest.approx(0.0041, abs=5e-4)
        assert _eair(bundle, 10.0).y_bf == pytest.approx(0.0161, abs=1.5e-3)

    def test_indexation_gap_shrinks(self, runs):
        rows = runs('table1_base').summary.eair_rows
        assert rows[0].delta > rows[-1].delta


class TestDepletion:
    def test_steady_state(self, runs):
        summary = runs('table1_base').summary
        assert summary.tau_moments['mean'] == pytest.approx(28.0, abs=1.0)
        assert summary.survival_at(20.0) > 0.80

    def test_baby_boom(self, runs):
        summary = runs('table1_bb').summary
        assert summary.tau_moments['mean'] == pytest.approx(23.0, abs=1.0)
        assert summary.survival_at(20.0) == pytest.approx(0.64, abs=0.03)


class TestDeltaSensitivity:
    def test_neutral_planner(self, runs):
        bundle = runs('table1_bb_delta0')
        assert bundle.summary.tau_moments['mean'] == pytest.approx(24.25, abs=0.5)
        assert bundle.summary.tau_moments['variance'] == pytest.approx(2.0, rel=0.25)
        assert _eair(bundle, 10.0).y_bf == pytest.approx(0.0151, abs=1.5e-3)

    def test_risk_averse_planner(self, runs):
        assert runs('table1_bb').summary.tau_moments['variance'] == pytest.approx(37.0, rel=0.15)

    def test_positive_wage_sensitivity_runs(self, runs):
        summary = runs('table1_bb_delta_e_pos').summary
        assert 0.0 < summary.tau_moments['mean'] <= 40.0


def test_zu0_sweep(simulator):
    grid = [float(v) for v in config_manager.get_calibration_config()['zu0_grid']]
    spec = SweepSpec(parameter=SweepParameter.ZU0, values=grid, base=load_preset('table1_base'))
    result = simulator.run_sweep(spec)
    pensions = [bundle.summary.standardized['mean_p_star_t30'] for bundle in result.bundles]
    best = int(np.argmax(pensions))
    assert abs(best - grid.index(14727.0)) <= 1
    chosen = result.bundles[grid.index(14727.0)].summary
    assert chosen.standardized['initial_relative_surplus'] == pytest.approx(0.0275, abs=2.5e-3)
    assert chosen.tau_moments['mean'] == pytest.approx(37.5, abs=1.0)


@pytest.mark.parametrize('steps_per_year, tolerance', [(120, 1e-2), (1200, 1e-3)])
def test_sde_oracles(simulator, steps_per_year, tolerance):
    base = load_preset('table1_base')
    config = base.with_updates(grid=TimeGrid(horizon_years=40.0, steps_per_year=steps_per_year))
    gaps = {'zu': 0.0, 'fund': 0.0}
    for start in range(0, 100, 10):
        chunk = simulator.crosscheck(config, range(start, start + 10), strict=False)
        gaps = {name: max(gaps[name], chunk[name]) for name in gaps}
    assert gaps['zu'] < tolerance
    assert gaps['fund'] < tolerance


def test_omega_weighting_changes_surplus(runs):
    equal = runs('table1_bb').summary
    weighted = runs('table1_bb_omega_dr').summary
    assert weighted.mean_at('pension_surplus', 30.0) != equal.mean_at('pension_surplus', 30.0)
