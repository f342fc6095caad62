#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""
結果資料模型定義
統計摘要、EAIR 表格列、掃描規格、執行清單與結果組合
"""

from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional

import numpy as np
import pandas as pd

from .enums import SweepParameter
from .errors import ConfigValidationError
from .params import ScenarioConfig


@dataclass
class EairRow:
    """EAIR 表格列（y^BF、y^min 與差值，單位：每年）"""
    t: float
    y_bf: float
    y_min: float
    delta: float
    y_bf_solvent: float = float('nan')
    y_bf_q25: float = float('nan')
    y_bf_median: float = float('nan')
    y_bf_q75: float = float('nan')

    def to_dict(self) -> Dict[str, float]:
        return {
            't': self.t, 'y_bf': self.y_bf, 'y_min': self.y_min, 'delta': self.delta,
            'y_bf_solvent': self.y_bf_solvent, 'y_bf_q25': self.y_bf_q25,
            'y_bf_median': self.y_bf_median, 'y_bf_q75': self.y_bf_q75,
        }


@dataclass
class SummaryStats:
    """
    蒙地卡羅統計摘要

    series_stats[name][conditioning] 為以報告時間為索引、欄位 mean/median/q25/q75 的 DataFrame；
    conditioning 為 'unconditional'、'solvent'（F* > 𝔎）或 'depleted'（F* = 𝔎）。
    """
    times: np.ndarray
    series_stats: Dict[str, Dict[str, pd.DataFrame]]
    survival: np.ndarray
    tau_moments: Dict[str, float]
    eair_rows: List[EairRow] = field(default_factory=list)
    histograms: Dict[str, pd.DataFrame] = field(default_factory=dict)
    standardized: Dict[str, float] = field(default_factory=dict)
    n_paths: int = 0

    def series_table(self, name: str, conditioning: str = 'unconditional') -> pd.DataFrame:
        """某序列的統計表（附存活率欄位）"""
        table = self.series_stats[name][conditioning].copy()
        table['survival'] = self.survival
        return table

    def mean_at(self, name: str, t: float, conditioning: str = 'unconditional') -> float:
        table = self.series_stats[name][conditioning]
        return float(table.loc[np.isclose(table.index.values, t), 'mean'].iloc[0])

    def survival_at(self, t: float) -> float:
        return float(self.survival[np.isclose(self.times, t)][0])

    def scalars(self) -> Dict[str, Any]:
        """JSON 摘要中的純量部分"""
        return {
            'n_paths': self.n_paths,
            'tau': dict(self.tau_moments),
            'survival': {f"{t:g}": float(s) for t, s in zip(self.times, self.survival)},
            'eair': [row.to_dict() for row in self.eair_rows],
            'standardized': dict(self.standardized),
        }


@dataclass
class SweepSpec:
    """參數掃描規格（每個掃描點只修改 base 的一個欄位）"""
    parameter: SweepParameter
    values: List[Any]
    base: ScenarioConfig
    shared_seed: bool = True
    recalibrate_target: Optional[float] = None   # θ 掃描時重新校準 Z^u_0 的初始相對盈餘

    def __post_init__(self):
        if not isinstance(self.parameter, SweepParameter):
            try:
                self.parameter = SweepParameter(self.parameter)
            except ValueError:
                raise ConfigValidationError(f"unknown sweep parameter '{self.parameter}'",
                                            key="sweep.parameter") from None
        if not self.values:
            raise ConfigValidationError("sweep requires at least one value", key="sweep.values")
        if self.recalibrate_target is not None and not self.recalibrate_target > 0:
            raise ConfigValidationError("recalibration target must be > 0", key="sweep.target")


@dataclass
class RunManifest:
    """執行清單：相同清單保證輸出逐位元相同"""
    config_hash: str
    master_seed: int
    n_paths: int
    grid: Dict[str, Any]
    engine_version: str
    chunk_size: int
    error_policy: str = 'fail_fast'
    failed_paths: List[int] = field(default_factory=list)
    checksums: Dict[str, str] = field(default_factory=dict)

    def to_dict(self) -> Dict[str, Any]:
        return {
            'config_hash': self.config_hash,
            'master_seed': self.master_seed,
            'n_paths': self.n_paths,
            'grid': dict(self.grid),
            'engine_version': self.engine_version,
            'chunk_size': self.chunk_size,
            'error_policy': self.error_policy,
            'failed_paths': list(self.failed_paths),
            'checksums': dict(sorted(self.checksums.items())),
        }


@dataclass
class ResultBundle:
    """單次情境執行的完整結果"""
    summary: SummaryStats
    manifest: RunManifest
    config: Dict[str, Any]
    path_dump: Optional[pd.DataFrame] = None
    label: str = 'run'


@dataclass
class SweepResult:
    """掃描結果：每個掃描點一個 ResultBundle"""
    parameter: str
    points: List[Any]
    bundles: List[ResultBundle]
    manifest: RunManifest

    def table(self) -> pd.DataFrame:
        """掃描摘要表（每點一列）"""
        rows = []
        for value, bundle in zip(self.points, self.bundles):
            summary = bundle.summary
            row = {'parameter': self.parameter, 'value': _format_value(value),
                   'zu0': bundle.config['preferences']['zu0'],
                   'tau_mean': summary.tau_moments.get('mean'),
                   'tau_median': summary.tau_moments.get('median'),
                   'tau_variance': summary.tau_moments.get('variance'),
                   'censored_fraction': summary.tau_moments.get('censored_fraction')}
            row.update(summary.standardized)
            rows.append(row)
        columns = ['parameter', 'value', 'zu0', 'tau_mean', 'tau_median', 'tau_variance',
                   'censored_fraction']
        if not rows:
            return pd.DataFrame(columns=columns)
        table = pd.DataFrame(rows)
        extra = [c for c in table.columns if c not in columns]
        return table[columns + extra]


def _format_value(value: Any) -> str:
    if isinstance(value, (list, tuple)):
        return ' '.join(f"{v:g}" for v in value)
    if hasattr(value, 'value'):
        return str(value.value)
    if isinstance(value, float):
        return f"{value:.17g}"
    return str(value)
