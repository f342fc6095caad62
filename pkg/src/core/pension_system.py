#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""
退休金制度模組
提撥、最低（純 PAYG）年金與永續界限 𝔎
"""

from typing import Union

import numpy as np
from scipy.integrate import cumulative_trapezoid

from ..demographics.base import DemographicSchedule, TimeLike
from ..models.params import PensionParams

ArrayLike = Union[float, np.ndarray]


def contributions(t: TimeLike, wage_t: ArrayLike, demo: DemographicSchedule,
                  alpha: float) -> ArrayLike:
    """提撥總額 C_t = α·e_t·N^w_t（千元/年）"""
    wage_t = np.asarray(wage_t, dtype=float)
    result = alpha * wage_t * _along_time(demo.n_workers(t), wage_t)
    return float(result) if result.ndim == 0 else result


def min_pension(t: TimeLike, wage_t: ArrayLike, demo: DemographicSchedule,
                alpha: float) -> ArrayLike:
    """
    每位退休者的最低年金 p_min = α·e_t/DR_t

    p_min·N^r_t = C_t，純 PAYG 制度自我平衡。
    """
    wage_t = np.asarray(wage_t, dtype=float)
    result = alpha * wage_t / _along_time(demo.dr(t), wage_t)
    return float(result) if result.ndim == 0 else result


def sustainability_bound_path(k0: float, rate_path: np.ndarray, dt: float) -> np.ndarray:
    """
    永續界限路徑 𝔎_t = 𝔎_0·exp(∫_0^t r_s ds)，積分採梯形法

    此處對應零曝險基準策略 π^𝔎 ≡ 0；𝔎_0 = 0 時恆為 0。
    """
    rate_path = np.asarray(rate_path, dtype=float)
    if k0 == 0.0:
        return np.zeros_like(rate_path)
    integral = cumulative_trapezoid(rate_path, dx=dt, axis=0, initial=0.0)
    return k0 * np.exp(integral)


def sustainability_bound(t: float, rate_path: np.ndarray, pension: PensionParams,
                         dt: float) -> ArrayLike:
    """時間 t 的永續界限 𝔎_t（t 須落在網格上）"""
    idx = int(round(t / dt))
    if idx < 0 or idx >= np.shape(rate_path)[0]:
        raise ValueError(f"time {t} is outside the rate path")
    return sustainability_bound_path(pension.k0, rate_path[:idx + 1], dt)[idx]


def _along_time(factor: ArrayLike, wage_t: np.ndarray) -> np.ndarray:
    """將依時間的因子沿路徑軸廣播到工資陣列"""
    factor = np.asarray(factor, dtype=float)
    if wage_t.ndim == 2 and factor.ndim == 1:
        return factor[:, None]
    return factor
