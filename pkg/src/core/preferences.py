#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""
前瞻偏好模組
退休者時間偏好 Z、跨世代權重 ω、隨機折現因子 ξ、緩衝基金效用權重 Z^u 與耗盡時間 τ

Z^u 以封閉式為主路徑；SDE 形式僅作交叉驗證。
"""

from typing import Tuple

import numpy as np
from scipy.integrate import cumulative_trapezoid

from .correlation import project_shocks
from ..demographics.base import DemographicSchedule, TimeLike
from ..models.enums import OmegaKind
from ..models.errors import DivergenceError
from ..models.params import DeltaLoadings, PreferenceParams, TimeGrid
from ..models.paths import MarketPath, PreferencePath
from ..utils.logger import setup_logger

# 建立日誌器
logger = setup_logger(__name__)


def omega_weight(t: TimeLike, demo: DemographicSchedule, omega_kind: OmegaKind) -> TimeLike:
    """
    退休者跨世代權重 ω_t

    EqualWeight → 1；DrRatio → DR_t/DR_0
    """
    if omega_kind is OmegaKind.EQUAL_WEIGHT:
        return 1.0 if np.ndim(t) == 0 else np.ones(np.shape(t))
    return demo.dr(t) / demo.dr(0.0)


def time_preference_path(times: np.ndarray, prefs: PreferenceParams) -> np.ndarray:
    """Z_t = z0·e^{−βt}"""
    return prefs.z0 * np.exp(-prefs.beta * np.asarray(times, dtype=float))


def xi_drift(market: MarketPath, prefs: PreferenceParams, loadings: DeltaLoadings) -> np.ndarray:
    """ln ξ 的漂移 (1−θ)r + ((1−θ)/2θ)((ᵗLδ)^S+η)² + ᵗδΓδ/2，於各網格點"""
    theta = prefs.theta
    exposure = loadings.lt_delta_s + market.eta
    return ((1.0 - theta) * market.r
            + (1.0 - theta) / (2.0 * theta) * exposure ** 2
            + 0.5 * loadings.delta_gamma_delta)


def discount_factor_path(market: MarketPath, prefs: PreferenceParams,
                         loadings: DeltaLoadings, dt: float) -> np.ndarray:
    """
    隨機效用折現因子 ξ

    ln ξ 的漂移積分採左端點 Euler；隨機積分 ∫δ·dB 以 Σ (ᵗLδ)·(獨立增量) 計算。ξ_0 = 1。
    """
    drift = xi_drift(market, prefs, loadings)[:-1] * dt
    noise = project_shocks(loadings.lt_delta, market.shocks)
    log_xi = np.zeros_like(market.r)
    np.cumsum(drift - noise, axis=0, out=log_xi[1:])
    return np.exp(log_xi)


def _along_time(values: np.ndarray, like: np.ndarray) -> np.ndarray:
    values = np.asarray(values, dtype=float)
    if like.ndim == 2 and values.ndim == 1:
        return values[:, None]
    return values


def zu_closed_form(xi: np.ndarray, n_retirees: np.ndarray, z: np.ndarray, omega: np.ndarray,
                   prefs: PreferenceParams, grid: TimeGrid
                   ) -> Tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
    """
    Z^u 的封閉式與耗盡時間

    Z^u_t = ξ_t^{−1}·((Z^u_0)^{1/θ}·(1 − D_t))^θ，
    D_t = ∫_0^t N^r_s (Z_s ω_s ξ_s / Z^u_0)^{1/θ} ds（梯形法累加）。
    τ 為 D ≥ 1（括號 ≤ 0）的第一個網格點；t ≥ τ 時 Z^u = 0，括號為負時不取冪。

    Returns:
        (zu, depletion_integral, tau, tau_index)；未耗盡時 tau = +inf、tau_index = n_points
    """
    inv_theta = 1.0 / prefs.theta
    weight = _along_time(n_retirees, xi) * (_along_time(z * omega, xi) * xi / prefs.zu0) ** inv_theta
    integral = cumulative_trapezoid(weight, dx=grid.dt, axis=0, initial=0.0)

    crossed = integral >= 1.0
    any_crossed = crossed.any(axis=0)
    tau_index = np.where(any_crossed, crossed.argmax(axis=0), grid.n_points)
    times = grid.times()
    tau = np.where(any_crossed, times[np.minimum(tau_index, grid.n_steps)], np.inf)

    alive = np.arange(grid.n_points).reshape((-1,) + (1,) * (xi.ndim - 1)) < tau_index
    bracket = np.where(alive, prefs.zu0 ** inv_theta * (1.0 - integral), 1.0)
    zu = np.where(alive, bracket ** prefs.theta / xi, 0.0)

    if xi.ndim == 1:
        return zu, integral, float(tau), int(tau_index)
    return zu, integral, tau, tau_index


def consumption_rate(n_retirees: np.ndarray, z: np.ndarray, omega: np.ndarray,
                     zu: np.ndarray, theta: float) -> np.ndarray:
    """超額年金給付率 N^r·(Zω/Z^u)^{1/θ}（Z^u = 0 時為 +inf）"""
    with np.errstate(divide='ignore'):
        ratio = _along_time(z * omega, zu) / zu
    return _along_time(n_retirees, zu) * ratio ** (1.0 / theta)


def zu_sde_form(market: MarketPath, n_retirees: np.ndarray, z: np.ndarray, omega: np.ndarray,
                prefs: PreferenceParams, loadings: DeltaLoadings, grid: TimeGrid,
                cutoff: float = 1e-12) -> np.ndarray:
    """
    以非線性 SDE 積分 Z^u（交叉驗證用）

    dZ^u = Z^u(−[(1−θ)r + ((1−θ)/2θ)((ᵗLδ)^S+η)² + θN^r(Zω/Z^u)^{1/θ}]dt + δ·dB)

    對數 Euler；非線性給付項採 Heun 預估-校正（梯形）。Z^u 低於 cutoff·Z^u_0 後記為 0。
    """
    theta = prefs.theta
    dt = grid.dt
    # ln Z^u 的線性部分：−[(1−θ)r + ...]dt − ᵗδΓδ/2·dt + δ·dB，正好是 −Δln ξ
    linear_inc = (-xi_drift(market, prefs, loadings)[:-1] * dt
                  + project_shocks(loadings.lt_delta, market.shocks))

    zu = np.zeros_like(market.r)
    zu[0] = prefs.zu0
    log_zu = np.full(market.r.shape[1:], np.log(prefs.zu0))
    active = np.ones(market.r.shape[1:], dtype=bool)
    floor = cutoff * prefs.zu0
    nr = _along_time(n_retirees, zu)
    zw = _along_time(z * omega, zu)

    with np.errstate(over='ignore', invalid='ignore', divide='ignore'):
        for k in range(grid.n_steps):
            c_left = nr[k] * (zw[k] * np.exp(-log_zu)) ** (1.0 / theta)
            predictor = log_zu + linear_inc[k] - theta * c_left * dt
            c_right = nr[k + 1] * (zw[k + 1] * np.exp(-predictor)) ** (1.0 / theta)
            log_zu = log_zu + linear_inc[k] - theta * 0.5 * (c_left + c_right) * dt
            value = np.exp(log_zu)
            active = active & np.isfinite(value) & (value >= floor)
            zu[k + 1] = np.where(active, value, 0.0)
            log_zu = np.where(active, log_zu, np.log(prefs.zu0))
    return zu


def crosscheck_gap(reference: np.ndarray, candidate: np.ndarray, tau_index,
                   window_fraction: float = 0.9) -> Tuple[float, int]:
    """
    [0, window_fraction·τ] 上的最大相對差距

    未耗盡路徑使用整個時間範圍。

    Returns:
        (最大相對差距, 發生位置的網格索引)
    """
    reference = np.asarray(reference, dtype=float)
    candidate = np.asarray(candidate, dtype=float)
    n_points = reference.shape[0]
    tau_index = np.asarray(tau_index)
    last = np.where(tau_index >= n_points, n_points - 1,
                    np.floor(window_fraction * tau_index).astype(int))
    idx = np.arange(n_points).reshape((-1,) + (1,) * (reference.ndim - 1))
    in_window = idx <= last
    with np.errstate(divide='ignore', invalid='ignore'):
        rel = np.abs(candidate - reference) / np.abs(reference)
    rel = np.where(in_window, rel, 0.0)
    worst = np.unravel_index(int(np.nanargmax(rel)), rel.shape)
    return float(rel[worst]), int(worst[0])


def check_divergence(reference: np.ndarray, candidate: np.ndarray, tau_index,
                     tolerance: float, window_fraction: float = 0.9) -> float:
    """超出容許值時拋出 DivergenceError，否則回傳最大相對差距"""
    gap, step = crosscheck_gap(reference, candidate, tau_index, window_fraction)
    if not gap <= tolerance:
        logger.error(f"❌ 交叉驗證差距 {gap:.3e} 超出容許值 {tolerance:.1e}（網格索引 {step}）")
        raise DivergenceError(step, gap, tolerance)
    logger.debug(f"交叉驗證最大相對差距 {gap:.3e}")
    return gap


def build_preference_path(market: MarketPath, demo: DemographicSchedule, prefs: PreferenceParams,
                          loadings: DeltaLoadings, grid: TimeGrid) -> PreferencePath:
    """偏好管線：Z、ω、ξ、Z^u 與 τ"""
    times = grid.times()
    z = time_preference_path(times, prefs)
    omega = np.asarray(omega_weight(times, demo, prefs.omega_kind), dtype=float)
    n_retirees = np.asarray(demo.n_retirees(times), dtype=float)
    xi = discount_factor_path(market, prefs, loadings, grid.dt)
    zu, integral, tau, tau_index = zu_closed_form(xi, n_retirees, z, omega, prefs, grid)
    return PreferencePath(times=times, z=z, omega=omega, xi=xi, zu=zu,
                          depletion_integral=integral, n_retirees=n_retirees,
                          tau=tau, tau_index=tau_index)
