#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""
隨機市場模組
Heston 股價/變異數、Vasicek 短期利率與對數常態工資的 Euler 模擬

變異數採完全截斷（drift 與 diffusion 皆使用 ν⁺），股價與工資以對數形式推進以保持正值。
"""

import numpy as np

from .correlation import cholesky_factor, correlate_increments
from ..models.errors import PathSimulationError
from ..models.params import MarketParams, TimeGrid
from ..models.paths import MarketPath
from ..utils.logger import setup_logger

# 建立日誌器
logger = setup_logger(__name__)

__all__ = ['cholesky_factor', 'correlate_increments', 'risk_premium', 'simulate_market_path']


def risk_premium(mu: float, r: np.ndarray, nu: np.ndarray, nu_floor: float) -> np.ndarray:
    """η = (μ − r)/√(ν ∨ ν_floor)"""
    return (mu - r) / np.sqrt(np.maximum(nu, nu_floor))


def simulate_market_path(params: MarketParams, grid: TimeGrid, chol: np.ndarray,
                         normals: np.ndarray) -> MarketPath:
    """
    模擬一條（或一批）市場路徑

    Args:
        params: 市場參數
        grid: 時間網格
        chol: Cholesky 因子 L
        normals: 獨立標準常態抽樣，形狀 (n_steps, 4) 或 (n_steps, n_paths, 4)

    Returns:
        MarketPath，狀態陣列形狀 (n_points,) 或 (n_points, n_paths)

    Raises:
        PathSimulationError: 出現非有限值（僅在參數極端時發生）
    """
    normals = np.asarray(normals, dtype=float)
    if normals.shape[0] != grid.n_steps or normals.shape[-1] != 4:
        raise ValueError(f"normals shape {normals.shape} does not match grid with {grid.n_steps} steps")

    dt = grid.dt
    shocks = normals * np.sqrt(dt)
    d_b = correlate_increments(chol, shocks)
    state_shape = (grid.n_points,) + normals.shape[1:-1]

    # 變異數：完全截斷 Euler，內部值 ν̃ 可為負，對外輸出 ν = ν̃⁺
    nu_tilde = np.empty(state_shape)
    nu_tilde[0] = params.nu0
    # 利率：Vasicek Euler
    r = np.empty(state_shape)
    r[0] = params.r0
    for k in range(grid.n_steps):
        nu_plus = np.maximum(nu_tilde[k], 0.0)
        nu_tilde[k + 1] = (nu_tilde[k] + params.kappa * (params.nu_bar - nu_plus) * dt
                           + params.sigma_nu * np.sqrt(nu_plus) * d_b[k, ..., 1])
        r[k + 1] = r[k] + params.a * (params.b - r[k]) * dt + params.sigma_r * d_b[k, ..., 2]
    nu = np.maximum(nu_tilde, 0.0)

    # 股價與工資：對數 Euler
    nu_left = nu[:-1]
    log_s_inc = (params.mu - 0.5 * nu_left) * dt + np.sqrt(nu_left) * d_b[..., 0]
    log_e_inc = (params.wage_drift - 0.5 * params.sigma_e ** 2) * dt + params.sigma_e * d_b[..., 3]
    log_s = np.empty(state_shape)
    log_s[0] = np.log(params.s0)
    np.cumsum(log_s_inc, axis=0, out=log_s[1:])
    log_s[1:] += log_s[0]
    log_e = np.empty(state_shape)
    log_e[0] = np.log(params.e0)
    np.cumsum(log_e_inc, axis=0, out=log_e[1:])
    log_e[1:] += log_e[0]

    s = np.exp(log_s)
    wage = np.exp(log_e)
    eta = risk_premium(params.mu, r, nu, params.nu_floor)

    for name, arr in (('s', s), ('nu', nu), ('r', r), ('wage', wage)):
        if not np.all(np.isfinite(arr)):
            raise PathSimulationError(-1, f"non-finite market state '{name}'")

    return MarketPath(times=grid.times(), s=s, nu=nu, r=r, wage=wage, eta=eta,
                      shocks=shocks, d_b=d_b, nu_floor=params.nu_floor)
