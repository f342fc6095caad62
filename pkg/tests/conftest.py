#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""
測試共用設定
內建情境、縮小網格的快速情境，以及 --runslow 選項（完整 N = 10,000 重現標記為 slow）
"""

from dataclasses import replace

import pytest

from src.core.scenario_loader import load_preset
from src.models.params import TimeGrid


def pytest_addoption(parser):
    parser.addoption("--runslow", action="store_true", default=False,
                     help="執行標記為 slow 的完整重現測試")


def pytest_configure(config):
    config.addinivalue_line("markers", "slow: 完整蒙地卡羅重現（需要 --runslow）")


def pytest_collection_modifyitems(config, items):
    if config.getoption("--runslow"):
        return
    skip_slow = pytest.mark.skip(reason="需要 --runslow")
    for item in items:
        if "slow" in item.keywords:
            item.add_marker(skip_slow)


@pytest.fixture(autouse=True)
def _single_worker_env(monkeypatch):
    """預設不限制工作數，個別測試可自行設定"""
    monkeypatch.delenv("PENSION_SIM_MAX_WORKERS", raising=False)


@pytest.fixture
def base_config():
    """穩態基準情境（40 年、每年 120 步）"""
    return load_preset('table1_base')


@pytest.fixture
def bb_config():
    """嬰兒潮基準情境"""
    return load_preset('table1_bb')


@pytest.fixture
def small_config(base_config):
    """5 年、每月一步、8 條路徑的快速情境"""
    return base_config.with_updates(grid=TimeGrid(horizon_years=5.0, steps_per_year=12), n_paths=8)


@pytest.fixture
def depleting_config(base_config):
    """以較大的初始盈餘（Z^u_0 較小）讓基金在數年內耗盡的快速情境"""
    prefs = replace(base_config.prefs, zu0=20.0)
    return base_config.with_updates(prefs=prefs, grid=TimeGrid(horizon_years=10.0, steps_per_year=24),
                                    n_paths=12)
