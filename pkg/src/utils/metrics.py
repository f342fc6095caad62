#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""
永續性與適足性指標模組
替代率、相對盈餘、EAIR、耗盡時間分佈與條件統計
"""

from typing import Dict, List, Optional, Sequence, Union

import numpy as np
import pandas as pd
from scipy.optimize import brentq

from ..models.enums import Conditioning
from ..models.errors import EairDomainError
from ..models.results import EairRow
from ..utils.logger import setup_logger

# 建立日誌器
logger = setup_logger(__name__)

ArrayLike = Union[float, np.ndarray]

STAT_COLUMNS = ['mean', 'median', 'q25', 'q75']


def benefit_ratio(p_star_t: ArrayLike, wage_t: ArrayLike) -> ArrayLike:
    """替代率 BR = p*_t / e_t"""
    wage_t = np.asarray(wage_t, dtype=float)
    if np.any(wage_t <= 0):
        raise ValueError("wage must be > 0")
    result = np.asarray(p_star_t, dtype=float) / wage_t
    return float(result) if result.ndim == 0 else result


def relative_surplus(p_star_t: ArrayLike, p_min_t: ArrayLike) -> ArrayLike:
    """相對盈餘 ρ = (p* − p_min)/p_min（耗盡後為 0）"""
    p_min_t = np.asarray(p_min_t, dtype=float)
    if np.any(p_min_t <= 0):
        raise ValueError("p_min must be > 0")
    result = (np.asarray(p_star_t, dtype=float) - p_min_t) / p_min_t
    return float(result) if result.ndim == 0 else result


def eair(cashflows: Sequence[float], base: Optional[float] = None, xtol: float = 1e-12) -> float:
    """
    等值年指數化率 (EAIR)

    求 y ∈ (−1, ∞) 使 Σ_{k=0}^{t}(1+y)^k = Σ c_k / c_base；左式對 y 嚴格遞增，根唯一。

    Args:
        cashflows: 年度現金流 c_0..c_t（整數年取樣）
        base: 基準現金流（預設為 c_0）；緩衝基金年金以純 PAYG 的 p_min,0 為基準

    Raises:
        EairDomainError: 現金流或基準非正，或少於兩點
    """
    flows = np.asarray(cashflows, dtype=float)
    if flows.ndim != 1 or flows.size < 2:
        raise EairDomainError("EAIR needs at least two annual cash flows")
    if not np.all(np.isfinite(flows)) or np.any(flows <= 0):
        raise EairDomainError("EAIR cash flows must be strictly positive")
    base = float(flows[0]) if base is None else float(base)
    if not (np.isfinite(base) and base > 0):
        raise EairDomainError("EAIR base cash flow must be strictly positive")

    target = float(flows.sum() / base)
    exponents = np.arange(flows.size)

    def gap(y: float) -> float:
        return float(np.sum((1.0 + y) ** exponents)) - target

    lo = -1.0 + 1e-12
    hi = 1.0
    while gap(hi) <= 0.0:
        hi *= 2.0
    if gap(lo) >= 0.0:
        return lo
    return float(brentq(gap, lo, hi, xtol=xtol, maxiter=500))


def eair_paths(annual_flows: np.ndarray, base: Optional[np.ndarray] = None) -> np.ndarray:
    """對每條路徑（欄）計算 EAIR，annual_flows 形狀 (t+1, n_paths)，base 為逐路徑基準"""
    if base is None:
        return np.array([eair(annual_flows[:, k]) for k in range(annual_flows.shape[1])])
    return np.array([eair(annual_flows[:, k], base[k]) for k in range(annual_flows.shape[1])])


def _row_stats(values: np.ndarray) -> List[float]:
    values = values[np.isfinite(values)]
    if values.size == 0:
        return [np.nan] * len(STAT_COLUMNS)
    q25, median, q75 = np.percentile(values, [25, 50, 75])
    return [float(np.mean(values)), float(median), float(q25), float(q75)]


def series_stats(samples: np.ndarray, times: np.ndarray,
                 mask: Optional[np.ndarray] = None) -> pd.DataFrame:
    """
    每個報告時間的 mean/median/q25/q75

    Args:
        samples: 形狀 (n_times, n_paths)，依路徑編號排序
        mask: 條件集合（同形狀布林陣列），None 表示不設條件
    """
    rows = []
    for i in range(samples.shape[0]):
        row = samples[i] if mask is None else samples[i][mask[i]]
        rows.append(_row_stats(row))
    return pd.DataFrame(rows, index=pd.Index(np.asarray(times, dtype=float), name='time'),
                        columns=STAT_COLUMNS)


def conditional_stats(samples: Dict[str, np.ndarray], solvent: np.ndarray,
                      times: np.ndarray) -> Dict[str, Dict[str, pd.DataFrame]]:
    """
    無條件與條件（存活 F*>𝔎 / 耗盡 F*=𝔎）統計

    Args:
        samples: 序列名稱 → (n_times, n_paths) 陣列
        solvent: (n_times, n_paths) 布林陣列，依政策門檻判定
    """
    if solvent.shape[1] == 0:
        raise ValueError("conditional statistics need at least one path")
    result = {}
    for name, values in samples.items():
        result[name] = {
            Conditioning.UNCONDITIONAL.value: series_stats(values, times),
            Conditioning.SOLVENT.value: series_stats(values, times, solvent),
            Conditioning.DEPLETED.value: series_stats(values, times, ~solvent),
        }
    return result


def survival_curve(tau: np.ndarray, times: np.ndarray) -> np.ndarray:
    """存活率 P(τ > t) = 1 − 經驗 CDF(t)"""
    return 1.0 - empirical_cdf(tau, times)


def empirical_cdf(tau: np.ndarray, times: np.ndarray) -> np.ndarray:
    """τ 的經驗 CDF，未耗盡路徑的 τ 為 +inf"""
    tau = np.asarray(tau, dtype=float)
    return np.array([np.count_nonzero(tau <= t) / tau.size for t in times])


def tau_moments(tau: np.ndarray, horizon: float) -> Dict[str, float]:
    """
    τ 的平均、中位數與變異數

    未耗盡路徑以 horizon 截斷，另外回報截斷比例。
    """
    tau = np.asarray(tau, dtype=float)
    censored = ~np.isfinite(tau) | (tau > horizon)
    clipped = np.where(censored, horizon, tau)
    return {
        'mean': float(np.mean(clipped)),
        'median': float(np.median(clipped)),
        'variance': float(np.var(clipped, ddof=1)) if clipped.size > 1 else 0.0,
        'censored_fraction': float(np.mean(censored)),
        'n_censored': int(np.count_nonzero(censored)),
        'horizon': float(horizon),
    }


def histogram(values: np.ndarray, masks: Optional[Dict[str, np.ndarray]] = None,
              bins: Union[str, int] = 'fd', bin_width: Optional[float] = None) -> pd.DataFrame:
    """
    固定時間點序列的分組次數

    分組邊界以無條件樣本計算（預設 Freedman–Diaconis），各條件共用同一組邊界。

    Args:
        values: 一維樣本
        masks: 條件名稱 → 布林遮罩
        bins: 'fd'、其他 numpy 規則名稱或組數
        bin_width: 指定組寬（優先於 bins）
    """
    values = np.asarray(values, dtype=float)
    finite = np.isfinite(values)
    base = values[finite]
    if base.size == 0:
        raise ValueError("histogram needs at least one finite value")
    if bin_width is not None:
        if not bin_width > 0:
            raise ValueError("bin width must be > 0")
        lo, hi = float(base.min()), float(base.max())
        n_bins = max(int(np.ceil((hi - lo) / bin_width)), 1)
        edges = lo + bin_width * np.arange(n_bins + 1)
    else:
        edges = np.histogram_bin_edges(base, bins=bins)

    table = pd.DataFrame({'bin_left': edges[:-1], 'bin_right': edges[1:]})
    table[Conditioning.UNCONDITIONAL.value] = np.histogram(base, bins=edges)[0]
    for name, mask in (masks or {}).items():
        selected = values[np.asarray(mask, dtype=bool) & finite]
        table[name] = np.histogram(selected, bins=edges)[0]
    return table


def eair_yields(annual_flows: np.ndarray, eair_times: Sequence[float],
                base: Optional[np.ndarray] = None) -> np.ndarray:
    """
    各 EAIR 時間點的逐路徑 EAIR

    Args:
        annual_flows: 形狀 (n_years+1, n_paths)，第 k 列為第 k 年的年金
        base: 逐路徑基準現金流（預設為第 0 年的年金）

    Returns:
        形狀 (len(eair_times), n_paths)
    """
    return np.array([eair_paths(annual_flows[:int(round(t)) + 1], base) for t in eair_times])


def eair_table(y_bf_paths: np.ndarray, y_min_paths: np.ndarray, tau: np.ndarray,
               eair_times: Sequence[float]) -> List[EairRow]:
    """
    EAIR 表：各 t 的平均 y^BF、y^min 與差值

    無條件 y^BF 使用 p*（耗盡後等於 p_min）；另附存活路徑平均與四分位數。

    Args:
        y_bf_paths: eair_yields 的輸出（以 p* 計算）
        y_min_paths: eair_yields 的輸出（以 p_min 計算）
    """
    rows = []
    for i, t in enumerate(eair_times):
        t_int = int(round(t))
        y_bf = y_bf_paths[i]
        y_min = y_min_paths[i]
        solvent = np.asarray(tau, dtype=float) > t_int
        q25, median, q75 = np.percentile(y_bf, [25, 50, 75])
        mean_bf = float(np.mean(y_bf))
        mean_min = float(np.mean(y_min))
        rows.append(EairRow(
            t=float(t_int), y_bf=mean_bf, y_min=mean_min, delta=mean_bf - mean_min,
            y_bf_solvent=float(np.mean(y_bf[solvent])) if solvent.any() else float('nan'),
            y_bf_q25=float(q25), y_bf_median=float(median), y_bf_q75=float(q75),
        ))
    return rows


def standardized_pensions(p_star_t: np.ndarray, p_min_t: np.ndarray, p_min0: float,
                          tau: np.ndarray, t: float) -> Dict[str, float]:
    """
    標準化年金指標（Z^u_0 研究用）

    E[p*_T/p_min,0]、E[p_min,T/p_min,0] 與分解
    E[p*_T] = E[p_min,T] + E[p*_T − p_min,T | τ ≥ T]·P(τ ≥ T)
    """
    surplus = p_star_t - p_min_t
    alive = np.asarray(tau, dtype=float) >= t
    p_alive = float(np.mean(alive))
    cond_surplus = float(np.mean(surplus[alive])) if alive.any() else 0.0
    suffix = f"_t{t:g}"
    return {
        'mean_p_star' + suffix: float(np.mean(p_star_t)),
        'mean_p_min' + suffix: float(np.mean(p_min_t)),
        'std_p_star' + suffix: float(np.mean(p_star_t / p_min0)),
        'std_p_min' + suffix: float(np.mean(p_min_t / p_min0)),
        'surplus_given_alive' + suffix: cond_surplus,
        'prob_alive' + suffix: p_alive,
        'decomposition_gap' + suffix: float(np.mean(p_star_t) - np.mean(p_min_t) - cond_surplus * p_alive),
    }
