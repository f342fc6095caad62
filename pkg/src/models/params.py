#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""
參數資料模型定義
市場、相關結構、時間網格、退休金制度、偏好與完整情境配置

所有參數物件建構後不可變更，並於建構時檢查不變量。
貨幣單位為千元，利率皆為年化，時間以年為單位。
"""

import math
from dataclasses import dataclass, field, replace
from functools import cached_property
from typing import Any, Dict, Tuple

import numpy as np

from .enums import OmegaKind
from .errors import ConfigValidationError
from ..core.correlation import build_gamma, cholesky_factor, delta_loadings
from ..demographics.base import DemographicSchedule

# 變異數下限相對於長期水準的比例；完全截斷 Euler 可能把 ν 推到 0，
# 此下限遠低於 Feller 條件下平穩分佈的下尾
NU_FLOOR_RATIO = 1e-2


def _require(condition: bool, message: str, key: str):
    if not condition:
        raise ConfigValidationError(message, key=key)


@dataclass(frozen=True)
class MarketParams:
    """Heston 股價、Vasicek 利率與工資動態參數"""
    mu_premium: float = 0.04     # 股票風險溢酬，μ = r0 + mu_premium
    s0: float = 1.0
    nu0: float = 0.04
    nu_bar: float = 0.04
    kappa: float = 3.0
    sigma_nu: float = 0.2
    r0: float = 0.03
    a: float = 0.5
    b: float = 0.02
    sigma_r: float = 0.02
    e0: float = 39.0             # 平均工資（千元/年）
    wage_drift: float = 0.02     # λ
    sigma_e: float = 0.02

    def __post_init__(self):
        _require(self.nu0 > 0, "nu0 must be > 0", "market.nu0")
        _require(self.nu_bar >= 0, "nu_bar must be >= 0", "market.nu_bar")
        _require(self.e0 > 0, "e0 must be > 0", "market.e0")
        _require(self.s0 > 0, "s0 must be > 0", "market.s0")
        _require(self.a > 0, "a must be > 0", "market.a")
        _require(self.kappa > 0, "kappa must be > 0", "market.kappa")
        for name in ('sigma_nu', 'sigma_r', 'sigma_e'):
            _require(getattr(self, name) >= 0, f"{name} must be >= 0", f"market.{name}")
        if self.sigma_nu > 0:
            _require(self.sigma_nu < math.sqrt(2.0 * self.kappa * self.nu_bar),
                     "Feller condition violated: sigma_nu^2 >= 2*kappa*nu_bar", "market.sigma_nu")

    @property
    def mu(self) -> float:
        """股票期望報酬率 μ（常數）"""
        return self.r0 + self.mu_premium

    @property
    def nu_floor(self) -> float:
        """η 與 √ν 分母的變異數下限：NU_FLOOR_RATIO·max(ν̄, ν_0)"""
        return NU_FLOOR_RATIO * max(self.nu_bar, self.nu0)


@dataclass(frozen=True)
class CorrelationStructure:
    """布朗運動 (B^S, B^ν, B^r, B^e) 的相關係數矩陣 Γ 與 Cholesky 因子 L"""
    rho_s_nu: float = -0.7
    rho_s_r: float = 0.0
    rho_s_e: float = 0.0
    rho_nu_r: float = 0.0
    rho_nu_e: float = 0.0
    rho_r_e: float = 0.0
    gamma: np.ndarray = field(init=False, repr=False, compare=False)
    chol: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        for name in ('rho_s_nu', 'rho_s_r', 'rho_s_e', 'rho_nu_r', 'rho_nu_e', 'rho_r_e'):
            value = getattr(self, name)
            _require(-1.0 <= value <= 1.0, f"{name} must lie in [-1, 1]", f"correlation.{name}")
        gamma = build_gamma(self.rho_s_nu, self.rho_s_r, self.rho_s_e,
                            self.rho_nu_r, self.rho_nu_e, self.rho_r_e)
        chol = cholesky_factor(gamma)
        gamma.setflags(write=False)
        chol.setflags(write=False)
        object.__setattr__(self, 'gamma', gamma)
        object.__setattr__(self, 'chol', chol)


@dataclass(frozen=True)
class TimeGrid:
    """固定步長時間網格"""
    horizon_years: float = 40.0
    steps_per_year: int = 120

    def __post_init__(self):
        _require(isinstance(self.steps_per_year, (int, np.integer)) and self.steps_per_year >= 1,
                 "steps_per_year must be an integer >= 1", "grid.steps_per_year")
        _require(self.horizon_years > 0, "horizon_years must be > 0", "grid.horizon_years")
        steps = self.horizon_years * self.steps_per_year
        _require(abs(steps - round(steps)) < 1e-9,
                 "horizon_years * steps_per_year must be an integer", "grid.horizon_years")

    @property
    def dt(self) -> float:
        return 1.0 / self.steps_per_year

    @property
    def n_steps(self) -> int:
        return int(round(self.horizon_years * self.steps_per_year))

    @property
    def n_points(self) -> int:
        return self.n_steps + 1

    def times(self) -> np.ndarray:
        """網格時間點（長度 n_steps + 1）"""
        return np.arange(self.n_points, dtype=float) / self.steps_per_year

    def index_of(self, t: float) -> int:
        """時間 t 對應的網格索引（t 須落在網格上）"""
        idx = int(round(t * self.steps_per_year))
        if idx < 0 or idx > self.n_steps or abs(idx / self.steps_per_year - t) > 1e-9:
            raise ValueError(f"time {t} is not on the simulation grid")
        return idx


@dataclass(frozen=True)
class PensionParams:
    """退休金制度參數"""
    alpha: float = 0.15   # 提撥率
    k0: float = 0.0       # 初始永續界限 𝔎_0（千元）

    def __post_init__(self):
        _require(0.0 < self.alpha < 1.0, "alpha must lie in (0, 1)", "pension.alpha")


@dataclass(frozen=True)
class PreferenceParams:
    """前瞻 CRRA 偏好參數"""
    theta: float = 4.0
    beta: float = 0.03
    z0: float = 1e-8
    zu0: float = 1296.0
    delta: Tuple[float, float, float, float] = (0.0, -0.2, -0.2, -0.2)
    omega_kind: OmegaKind = OmegaKind.EQUAL_WEIGHT

    def __post_init__(self):
        _require(self.theta > 0, "theta must be > 0", "preferences.theta")
        _require(self.theta != 1.0, "theta = 1 is excluded (degenerate CRRA)", "preferences.theta")
        _require(self.z0 > 0, "z0 must be > 0", "preferences.z0")
        _require(self.zu0 > 0, "zu0 must be > 0", "preferences.zu0")
        delta = tuple(float(d) for d in self.delta)
        _require(len(delta) == 4, "delta must have 4 components (S, nu, r, e)", "preferences.delta")
        object.__setattr__(self, 'delta', delta)
        if not isinstance(self.omega_kind, OmegaKind):
            try:
                object.__setattr__(self, 'omega_kind', OmegaKind(self.omega_kind))
            except ValueError:
                raise ConfigValidationError(f"unknown omega_kind '{self.omega_kind}'",
                                            key="preferences.omega_kind") from None


@dataclass(frozen=True)
class DeltaLoadings:
    """δ 透過 ᵗLδ 分解為可避險分量與正交殘差"""
    lt_delta: np.ndarray
    lt_delta_s: float
    lt_delta_perp_sq: float
    delta_gamma_delta: float

    @classmethod
    def from_params(cls, prefs: PreferenceParams, correlation: CorrelationStructure) -> 'DeltaLoadings':
        lt_delta = delta_loadings(correlation.chol, prefs.delta)
        lt_delta.setflags(write=False)
        delta = np.asarray(prefs.delta)
        dgd = float(delta @ correlation.gamma @ delta)
        perp_sq = float(np.dot(lt_delta[1:], lt_delta[1:]))
        s = float(lt_delta[0])
        if abs(dgd - (s * s + perp_sq)) > 1e-12:
            raise ValueError("delta decomposition identity violated")
        return cls(lt_delta=lt_delta, lt_delta_s=s, lt_delta_perp_sq=perp_sq, delta_gamma_delta=dgd)


@dataclass(frozen=True)
class ScenarioConfig:
    """單一實驗的完整、可序列化描述"""
    market: MarketParams
    correlation: CorrelationStructure
    demo: DemographicSchedule
    pension: PensionParams
    prefs: PreferenceParams
    grid: TimeGrid
    f0: float = 585.0
    n_paths: int = 10000
    master_seed: int = 42

    def __post_init__(self):
        _require(self.f0 > self.pension.k0, "initial fund must exceed the sustainability bound (f0 > k0)",
                 "simulation.f0")
        _require(isinstance(self.n_paths, (int, np.integer)) and self.n_paths >= 1,
                 "n_paths must be an integer >= 1", "simulation.n_paths")
        _require(isinstance(self.master_seed, (int, np.integer)) and self.master_seed >= 0,
                 "master_seed must be a non-negative integer", "simulation.master_seed")
        self.demo.validate_on_grid(self.grid.times())

    @cached_property
    def loadings(self) -> DeltaLoadings:
        return DeltaLoadings.from_params(self.prefs, self.correlation)

    @property
    def c0(self) -> float:
        """初始提撥 C_0 = α·e0·N^w(0)"""
        return self.pension.alpha * self.market.e0 * self.demo.n_workers(0.0)

    @property
    def p_min0(self) -> float:
        """初始最低（純 PAYG）年金 p_min,0 = α·e0/DR_0"""
        return self.pension.alpha * self.market.e0 / self.demo.dr(0.0)

    def with_updates(self, **changes: Any) -> 'ScenarioConfig':
        """回傳修改部分欄位後的新配置（重新檢查不變量）"""
        return replace(self, **changes)

    def summary(self) -> Dict[str, Any]:
        """用於日誌的簡要資訊"""
        return {
            'demographics': self.demo.kind.value,
            'theta': self.prefs.theta,
            'zu0': self.prefs.zu0,
            'f0': self.f0,
            'n_paths': self.n_paths,
            'horizon': self.grid.horizon_years,
            'steps_per_year': self.grid.steps_per_year,
        }
