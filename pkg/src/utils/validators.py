#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""
情境驗證模組
在不執行模擬的情況下檢查情境配置，並對合法但可疑的設定提出警告
"""

import math
from typing import Any, Dict

from ..core.scenario_loader import parse_config_text
from ..models.errors import ConfigValidationError, PensionSimError
from ..models.params import ScenarioConfig
from ..utils.logger import setup_logger

# 建立日誌器
logger = setup_logger(__name__)

# 建議範圍：超出時只警告
RECOMMENDED_RANGES = {
    'theta': (0.5, 10.0),
    'steps_per_year': (12, 1200),
    'initial_relative_surplus': (0.0, 0.5),
}


def check_scenario(config: ScenarioConfig) -> Dict[str, Any]:
    """
    已通過不變量檢查的配置的建議性檢查

    Returns:
        驗證結果（is_valid 恆為 True，只附帶 warnings 與 recommendations）
    """
    validation_result = {
        'is_valid': True,
        'issues': [],
        'warnings': [],
        'recommendations': [],
    }

    market = config.market
    if market.sigma_nu > 0:
        # Feller 比值越接近 1，完全截斷造成的偏誤越大
        feller_ratio = market.sigma_nu ** 2 / (2.0 * market.kappa * market.nu_bar)
        if feller_ratio > 0.9:
            validation_result['warnings'].append(
                f"Feller 比值 {feller_ratio:.3f} 接近 1，變異數可能頻繁觸及 0"
            )

    lo, hi = RECOMMENDED_RANGES['theta']
    if not lo <= config.prefs.theta <= hi:
        validation_result['warnings'].append(f"θ = {config.prefs.theta:g} 超出建議範圍 [{lo}, {hi}]")
    if config.prefs.theta < 1.0:
        validation_result['recommendations'].append("θ < 1 時效用在 F* = 𝔎 有界，可評估耗盡後的效用")

    lo, hi = RECOMMENDED_RANGES['steps_per_year']
    if not lo <= config.grid.steps_per_year <= hi:
        validation_result['warnings'].append(
            f"steps_per_year = {config.grid.steps_per_year} 超出建議範圍 [{lo}, {hi}]"
        )
    if not float(config.grid.horizon_years).is_integer():
        validation_result['warnings'].append("horizon_years 非整數，EAIR 只在整數年計算")

    # 初始相對盈餘 ρ_0 = (Z_0/Z^u_0)^{1/θ}·(F_0 − 𝔎_0)/p_min,0
    rho0 = ((config.prefs.z0 / config.prefs.zu0) ** (1.0 / config.prefs.theta)
            * (config.f0 - config.pension.k0) / config.p_min0)
    lo, hi = RECOMMENDED_RANGES['initial_relative_surplus']
    if not math.isfinite(rho0) or rho0 > hi:
        validation_result['warnings'].append(f"初始相對盈餘 ρ_0 = {rho0:.4g}，基金可能很快耗盡")
    validation_result['initial_relative_surplus'] = rho0

    if config.n_paths < 1000:
        validation_result['recommendations'].append(
            f"n_paths = {config.n_paths}，統計量的抽樣誤差可能偏大"
        )
    if all(d == 0.0 for d in config.prefs.delta):
        validation_result['recommendations'].append("δ = 0：社會規劃者對風險中立，τ 的變異數會很小")

    return validation_result


def validate_scenario_text(text: str, source: str = '<string>') -> Dict[str, Any]:
    """
    驗證情境文件文字

    Returns:
        驗證結果：is_valid、issues（含鍵與行號）、warnings、recommendations，
        成功時另附 config
    """
    validation_result: Dict[str, Any] = {
        'is_valid': True,
        'issues': [],
        'warnings': [],
        'recommendations': [],
    }
    try:
        config = parse_config_text(text, source)
    except ConfigValidationError as e:
        validation_result['is_valid'] = False
        validation_result['issues'].append(str(e))
        return validation_result
    except PensionSimError as e:
        logger.error(f"驗證情境配置錯誤: {e}")
        validation_result['is_valid'] = False
        validation_result['issues'].append(str(e))
        return validation_result

    advice = check_scenario(config)
    validation_result['warnings'].extend(advice['warnings'])
    validation_result['recommendations'].extend(advice['recommendations'])
    validation_result['initial_relative_surplus'] = advice['initial_relative_surplus']
    validation_result['config'] = config
    return validation_result
