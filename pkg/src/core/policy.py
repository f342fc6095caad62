#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""
最適政策模組
最適投資/年金政策、緩衝基金路徑與耗盡後的最低年金制度

基金超額 G = F* − 𝔎 由封閉式 G = Y·(Z^u)^{1/θ} 求得，SDE 積分只作驗證。
"""

import numpy as np
from scipy.integrate import cumulative_trapezoid

from .correlation import project_shocks
from .pension_system import min_pension, sustainability_bound_path
from .preferences import consumption_rate
from ..demographics.base import DemographicSchedule
from ..models.errors import UnboundedUtilityError
from ..models.params import DeltaLoadings, PensionParams, PreferenceParams, TimeGrid
from ..models.paths import MarketPath, PolicyPath, PreferencePath
from ..utils.logger import setup_logger

# 建立日誌器
logger = setup_logger(__name__)

# 風險資產比例只在 F* − 𝔎 > 門檻·(F_0 − 𝔎_0) 處回報；G 與初始盈餘成正比
SOLVENCY_THRESHOLD = 1e-9


def _alive_mask(pref_path: PreferencePath, like: np.ndarray) -> np.ndarray:
    """t < τ 的網格點"""
    idx = np.arange(like.shape[0]).reshape((-1,) + (1,) * (like.ndim - 1))
    return idx < np.asarray(pref_path.tau_index)


def _along_time(values: np.ndarray, like: np.ndarray) -> np.ndarray:
    values = np.asarray(values, dtype=float)
    if like.ndim == 2 and values.ndim == 1:
        return values[:, None]
    return values


def log_surplus_y(market: MarketPath, prefs: PreferenceParams, loadings: DeltaLoadings,
                  g0: float, dt: float) -> np.ndarray:
    """
    年金盈餘過程 ln Y 的封閉式

    ln Y_t = ln Y_0 + (1/θ)∫[(r + (η² + ‖(ᵗLδ)^⊥‖²)/2)ds + ((ᵗLδ)^S+η)dB^S − δ·dB]，
    Y_0 = (F_0 − 𝔎_0)·(Z^u_0)^{−1/θ}
    """
    inv_theta = 1.0 / prefs.theta
    r = market.r[:-1]
    eta = market.eta[:-1]
    drift = (r + 0.5 * (eta ** 2 + loadings.lt_delta_perp_sq)) * dt
    noise = ((loadings.lt_delta_s + eta) * market.d_b[..., 0]
             - project_shocks(loadings.lt_delta, market.shocks))
    log_y = np.empty_like(market.r)
    log_y[0] = np.log(g0) - inv_theta * np.log(prefs.zu0)
    np.cumsum(inv_theta * (drift + noise), axis=0, out=log_y[1:])
    log_y[1:] += log_y[0]
    return log_y


def optimal_policy_path(market: MarketPath, pref_path: PreferencePath, demo: DemographicSchedule,
                        pension: PensionParams, prefs: PreferenceParams, loadings: DeltaLoadings,
                        grid: TimeGrid, f0: float) -> PolicyPath:
    """
    最適政策路徑

    π* = π^𝔎 + (G/θ)((ᵗLδ)^S+η)·1{t<τ}，p* = p_min + (Zω)^{1/θ}·Y·1{t<τ}，F* = 𝔎 + G；
    t ≥ τ 後回到純 PAYG：p* = p_min、π* = 0、F* = 𝔎。
    """
    theta = prefs.theta
    inv_theta = 1.0 / theta
    times = grid.times()

    p_min = min_pension(times, market.wage, demo, pension.alpha)
    k_bound = sustainability_bound_path(pension.k0, market.r, grid.dt)
    alive = _alive_mask(pref_path, market.r)

    g0 = f0 - pension.k0
    log_y = log_surplus_y(market, prefs, loadings, g0, grid.dt)
    surplus_y = np.where(alive, np.exp(log_y), 0.0)

    # G = Y·ξ^{−1/θ}·(Z^u_0)^{1/θ}(1 − D)
    bracket = np.where(alive, prefs.zu0 ** inv_theta * (1.0 - pref_path.depletion_integral), 0.0)
    g = np.where(alive, surplus_y * pref_path.xi ** (-inv_theta) * bracket, 0.0)
    fund = g + k_bound

    zw = _along_time(pref_path.z * pref_path.omega, market.r)
    pension_surplus = np.where(alive, zw ** inv_theta * surplus_y, 0.0)
    p_star = p_min + pension_surplus

    exposure = loadings.lt_delta_s + market.eta
    sqrt_nu = market.sqrt_nu
    pi_star = np.where(alive, g * exposure * inv_theta, 0.0)
    phi_star = pi_star / sqrt_nu
    with np.errstate(divide='ignore', invalid='ignore'):
        risky = ((fund - k_bound) / fund) * exposure / (theta * sqrt_nu)
    risky_fraction = np.where(g > SOLVENCY_THRESHOLD * g0, risky, np.nan)

    return PolicyPath(times=times, pi_star=pi_star, phi_star=phi_star, risky_fraction=risky_fraction,
                      p_star=p_star, p_min=p_min, pension_surplus=pension_surplus, fund=fund,
                      surplus_y=surplus_y, k_bound=k_bound)


def euler_fund_crosscheck(market: MarketPath, pref_path: PreferencePath, pension: PensionParams,
                          prefs: PreferenceParams, loadings: DeltaLoadings, grid: TimeGrid,
                          f0: float, payout_multiplier: float = 1.0) -> np.ndarray:
    """
    以對數 Euler 積分基金 SDE

    dF* = d𝔎 + (F*−𝔎)[(r − m·N^r(Zω/Z^u)^{1/θ})dt + (1/θ)((ᵗLδ)^S+η)(dB^S + η dt)]

    給付項取區間兩端的梯形平均。m = 1 為最適政策；m > 1 為放大年金盈餘的次佳政策
    （仍滿足 p ≥ p_min 與 F ≥ 𝔎）。Z^u 歸零後基金固定在 𝔎。

    Returns:
        基金路徑 F
    """
    theta = prefs.theta
    dt = grid.dt
    exposure = loadings.lt_delta_s + market.eta
    payout = payout_multiplier * consumption_rate(pref_path.n_retirees, pref_path.z, pref_path.omega,
                                                  pref_path.zu, theta)
    base_inc = ((market.r[:-1] + exposure[:-1] * market.eta[:-1] / theta
                 - exposure[:-1] ** 2 / (2.0 * theta ** 2)) * dt
                + exposure[:-1] * market.d_b[..., 0] / theta)
    with np.errstate(invalid='ignore'):
        payout_inc = 0.5 * (payout[:-1] + payout[1:]) * dt
    log_g = np.empty_like(market.r)
    log_g[0] = np.log(f0 - pension.k0)
    with np.errstate(invalid='ignore'):
        np.cumsum(base_inc - payout_inc, axis=0, out=log_g[1:])
    log_g[1:] += log_g[0]

    alive = _alive_mask(pref_path, market.r)
    g = np.where(alive & np.isfinite(log_g), np.exp(log_g), 0.0)
    return g + sustainability_bound_path(pension.k0, market.r, dt)


def perturbed_policy_path(market: MarketPath, pref_path: PreferencePath, policy: PolicyPath,
                          prefs: PreferenceParams, grid: TimeGrid, multiplier: float = 1.1) -> PolicyPath:
    """
    次佳政策：耗盡前年金盈餘給付率放大 multiplier 倍，投資規則不變

    G^m_t = G_t·exp(−(m−1)∫_0^t N^r(Zω/Z^u)^{1/θ} ds)，p^m − p_min = m·G^m·(Zω/Z^u)^{1/θ}。
    """
    theta = prefs.theta
    alive = _alive_mask(pref_path, market.r)
    rate = consumption_rate(pref_path.n_retirees, pref_path.z, pref_path.omega,
                            np.where(alive, pref_path.zu, 1.0), theta)
    rate = np.where(alive, rate, 0.0)
    drain = cumulative_trapezoid(rate, dx=grid.dt, axis=0, initial=0.0)
    g_opt = policy.fund - policy.k_bound
    g = np.where(alive, g_opt * np.exp(-(multiplier - 1.0) * drain), 0.0)
    nr = _along_time(pref_path.n_retirees, g)
    with np.errstate(divide='ignore', invalid='ignore'):
        surplus = np.where(alive, multiplier * g * rate / nr, 0.0)
    exposure = policy.pi_star
    with np.errstate(divide='ignore', invalid='ignore'):
        scale = np.where(g_opt > 0.0, g / g_opt, 0.0)
    pi = exposure * scale
    return PolicyPath(times=policy.times, pi_star=pi, phi_star=policy.phi_star * scale,
                      risky_fraction=policy.risky_fraction, p_star=policy.p_min + surplus,
                      p_min=policy.p_min, pension_surplus=surplus, fund=g + policy.k_bound,
                      surplus_y=policy.surplus_y * scale, k_bound=policy.k_bound)


def evaluate_utility_process(policy: PolicyPath, pref_path: PreferencePath, theta: float,
                             dt: float) -> np.ndarray:
    """
    前瞻效用準則 U(t, F_t) + ∫_0^t V(s, p_s) ds

    U(t, x) = Z^u_t (x−𝔎_t)^{1−θ}/(1−θ)，V(t, p) = N^r_t ω_t Z_t (p−p_min)^{1−θ}/(1−θ)；
    V 的時間積分採梯形法。

    Raises:
        UnboundedUtilityError: θ > 1 且路徑觸及 F = 𝔎（效用發散）
    """
    g = policy.fund - policy.k_bound
    if theta > 1.0 and (np.any(g <= 0.0) or np.any(policy.pension_surplus <= 0.0)):
        raise UnboundedUtilityError("utility is unbounded at F* = K for theta > 1")

    power = 1.0 - theta
    u = pref_path.zu * g ** power / power
    weight = _along_time(pref_path.n_retirees * pref_path.omega * pref_path.z, g)
    v = weight * policy.pension_surplus ** power / power
    return u + cumulative_trapezoid(v, dx=dt, axis=0, initial=0.0)


def pure_investment_wealth(market: MarketPath, prefs: PreferenceParams, loadings: DeltaLoadings,
                           w0: float, dt: float) -> np.ndarray:
    """
    純投資組合財富（無年金給付，依最適曝險比例投資）

    d ln W = [r + (1/θ)((ᵗLδ)^S+η)η − ((ᵗLδ)^S+η)²/(2θ²)]dt + (1/θ)((ᵗLδ)^S+η)dB^S；
    用於排序樂觀/悲觀單一路徑情境。
    """
    theta = prefs.theta
    exposure = (loadings.lt_delta_s + market.eta)[:-1]
    inc = ((market.r[:-1] + exposure * market.eta[:-1] / theta - exposure ** 2 / (2.0 * theta ** 2)) * dt
           + exposure * market.d_b[..., 0] / theta)
    log_w = np.empty_like(market.r)
    log_w[0] = np.log(w0)
    np.cumsum(inc, axis=0, out=log_w[1:])
    log_w[1:] += log_w[0]
    return np.exp(log_w)
