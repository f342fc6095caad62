#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""
路徑資料模型定義
市場、偏好與政策的時間序列

陣列第一軸為時間網格點；批次模擬時第二軸為路徑。
增量陣列（shocks、d_b）長度為步數，最後一軸為因子 (S, ν, r, e)。
"""

from dataclasses import dataclass, fields
from typing import Any, Dict

import numpy as np


_INCREMENT_FIELDS = ('shocks', 'd_b')
_SCALAR_FIELDS = {'tau': float, 'tau_index': int}


def _slice_path(obj: Any, k: int) -> Dict[str, Any]:
    """取出批次中第 k 條路徑的欄位（共用的一維欄位原樣保留）"""
    values = {}
    for f in fields(obj):
        value = getattr(obj, f.name)
        if f.name in _SCALAR_FIELDS:
            values[f.name] = _SCALAR_FIELDS[f.name](np.asarray(value)[k])
        elif f.name in _INCREMENT_FIELDS:
            values[f.name] = value[:, k, :]
        elif isinstance(value, np.ndarray) and value.ndim == 2:
            values[f.name] = value[:, k]
        else:
            values[f.name] = value
    return values


@dataclass
class MarketPath:
    """市場與經濟狀態路徑 (S, ν, r, e) 與風險溢酬 η"""
    times: np.ndarray
    s: np.ndarray
    nu: np.ndarray
    r: np.ndarray
    wage: np.ndarray
    eta: np.ndarray
    shocks: np.ndarray        # 獨立標準常態 × √dt
    d_b: np.ndarray           # 相關增量 dB = L·shocks
    nu_floor: float = 0.0     # η 與 √ν 分母的變異數下限

    @property
    def sqrt_nu(self) -> np.ndarray:
        """√(ν ∨ ν_floor)"""
        return np.sqrt(np.maximum(self.nu, self.nu_floor))

    @property
    def n_paths(self) -> int:
        return 1 if self.s.ndim == 1 else self.s.shape[1]

    def path(self, k: int) -> 'MarketPath':
        if self.s.ndim == 1:
            return self
        return MarketPath(**_slice_path(self, k))


@dataclass
class PreferencePath:
    """偏好狀態路徑：Z、ω、ξ、Z^u、耗盡積分與耗盡時間 τ"""
    times: np.ndarray
    z: np.ndarray
    omega: np.ndarray
    xi: np.ndarray
    zu: np.ndarray
    depletion_integral: np.ndarray
    n_retirees: np.ndarray
    tau: np.ndarray           # 年；未耗盡為 +inf
    tau_index: np.ndarray     # 網格索引；未耗盡為 n_points

    @property
    def depleted(self) -> np.ndarray:
        """各網格點是否已耗盡（t ≥ τ）"""
        idx = np.arange(len(self.times))
        if self.zu.ndim == 1:
            return idx >= int(self.tau_index)
        return idx[:, None] >= np.asarray(self.tau_index)[None, :]

    def path(self, k: int) -> 'PreferencePath':
        if self.zu.ndim == 1:
            return self
        return PreferencePath(**_slice_path(self, k))


@dataclass
class PolicyPath:
    """最適政策路徑：π*、φ*、風險資產比例、p*、p_min、F*、Y 與 𝔎"""
    times: np.ndarray
    pi_star: np.ndarray
    phi_star: np.ndarray
    risky_fraction: np.ndarray   # 僅在 F* − 𝔎 > 門檻處有值，其餘為 NaN
    p_star: np.ndarray
    p_min: np.ndarray
    pension_surplus: np.ndarray  # p* − p_min = (Zω)^{1/θ}·Y，直接由封閉式計算
    fund: np.ndarray
    surplus_y: np.ndarray
    k_bound: np.ndarray

    @property
    def surplus_fund(self) -> np.ndarray:
        """基金超額 G = F* − 𝔎"""
        return self.fund - self.k_bound

    def path(self, k: int) -> 'PolicyPath':
        if self.fund.ndim == 1:
            return self
        return PolicyPath(**_slice_path(self, k))
