#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""
人口情境實作
穩態（SS）、線性上升（嬰兒潮 BB）與自訂表格
"""

from typing import Any, Dict, List, Sequence, Tuple

import numpy as np

from .base import DemographicSchedule, TimeLike
from ..models.enums import DemographicKind
from ..models.errors import ConfigValidationError


class SteadyStateSchedule(DemographicSchedule):
    """穩態：DR(t) = dr0"""

    kind = DemographicKind.STEADY_STATE

    def __init__(self, dr0: float = 0.3, n_workers: float = 100.0):
        super().__init__(n_workers)
        if not dr0 > 0:
            raise ConfigValidationError("dr0 must be > 0", key="demographics.dr0")
        self.dr0 = float(dr0)

    def dr(self, t: TimeLike) -> TimeLike:
        if np.ndim(t) == 0:
            return self.dr0
        return np.full(np.shape(t), self.dr0)

    def to_dict(self) -> Dict[str, Any]:
        return {'kind': self.kind.value, 'n_workers': self._n_workers, 'dr0': self.dr0}


class LinearRampSchedule(DemographicSchedule):
    """線性上升：DR 由 dr_start 線性變為 dr_end（ramp_years 後維持不變）"""

    kind = DemographicKind.LINEAR_RAMP

    def __init__(self, dr_start: float = 0.3, dr_end: float = 0.5,
                 ramp_years: float = 40.0, n_workers: float = 100.0):
        super().__init__(n_workers)
        if not (dr_start > 0 and dr_end > 0):
            raise ConfigValidationError("dr_start and dr_end must be > 0", key="demographics.dr_start")
        if not ramp_years > 0:
            raise ConfigValidationError("ramp_years must be > 0", key="demographics.ramp_years")
        self.dr_start = float(dr_start)
        self.dr_end = float(dr_end)
        self.ramp_years = float(ramp_years)

    def dr(self, t: TimeLike) -> TimeLike:
        frac = np.clip(np.asarray(t, dtype=float) / self.ramp_years, 0.0, 1.0)
        value = self.dr_start + (self.dr_end - self.dr_start) * frac
        return float(value) if np.ndim(t) == 0 else value

    def to_dict(self) -> Dict[str, Any]:
        return {
            'kind': self.kind.value,
            'n_workers': self._n_workers,
            'dr_start': self.dr_start,
            'dr_end': self.dr_end,
            'ramp_years': self.ramp_years,
        }


class CustomTableSchedule(DemographicSchedule):
    """
    自訂表格：[[t, dr], ...] 節點之間採階梯內插

    DR(t) 取不超過 t 的最後一個節點值；t 小於第一個節點時取第一個節點值。
    """

    kind = DemographicKind.CUSTOM

    def __init__(self, table: Sequence[Sequence[float]], n_workers: float = 100.0):
        super().__init__(n_workers)
        knots = self._parse_table(table)
        self.knot_times = np.array([k[0] for k in knots], dtype=float)
        self.knot_values = np.array([k[1] for k in knots], dtype=float)

    @staticmethod
    def _parse_table(table: Sequence[Sequence[float]]) -> List[Tuple[float, float]]:
        if not table:
            raise ConfigValidationError("custom table must not be empty", key="demographics.table")
        knots = []
        for i, row in enumerate(table):
            if len(row) != 2:
                raise ConfigValidationError("table rows must be [time, dr] pairs",
                                            key=f"demographics.table[{i}]")
            t, value = float(row[0]), float(row[1])
            if not value > 0:
                raise ConfigValidationError("dependency ratio must be > 0",
                                            key=f"demographics.table[{i}]")
            knots.append((t, value))
        times = [k[0] for k in knots]
        if any(b <= a for a, b in zip(times, times[1:])):
            raise ConfigValidationError("table times must be strictly increasing",
                                        key="demographics.table")
        return knots

    def dr(self, t: TimeLike) -> TimeLike:
        idx = np.searchsorted(self.knot_times, np.asarray(t, dtype=float), side='right') - 1
        value = self.knot_values[np.clip(idx, 0, len(self.knot_values) - 1)]
        return float(value) if np.ndim(t) == 0 else value

    def to_dict(self) -> Dict[str, Any]:
        return {
            'kind': self.kind.value,
            'n_workers': self._n_workers,
            'table': [[float(t), float(v)] for t, v in zip(self.knot_times, self.knot_values)],
        }


# 各情境允許的鍵
SCHEDULE_KEYS = {
    DemographicKind.STEADY_STATE: {'kind', 'n_workers', 'dr0'},
    DemographicKind.LINEAR_RAMP: {'kind', 'n_workers', 'dr_start', 'dr_end', 'ramp_years'},
    DemographicKind.CUSTOM: {'kind', 'n_workers', 'table'},
}


def create_schedule(section: Dict[str, Any]) -> DemographicSchedule:
    """
    由情境文件的 demographics 區段建立人口情境

    Raises:
        ConfigValidationError: 未知的 kind 或多餘的鍵
    """
    raw_kind = section.get('kind')
    try:
        kind = DemographicKind(raw_kind)
    except ValueError:
        raise ConfigValidationError(f"unknown demographic kind '{raw_kind}'",
                                    key="demographics.kind") from None

    unknown = sorted(set(section) - SCHEDULE_KEYS[kind])
    if unknown:
        raise ConfigValidationError(f"unknown key for {kind.value} schedule",
                                    key=f"demographics.{unknown[0]}")

    params = {k: v for k, v in section.items() if k != 'kind'}
    try:
        if kind is DemographicKind.STEADY_STATE:
            return SteadyStateSchedule(**params)
        if kind is DemographicKind.LINEAR_RAMP:
            return LinearRampSchedule(**params)
        if 'table' not in params:
            raise ConfigValidationError("custom schedule requires a table", key="demographics.table")
        return CustomTableSchedule(**params)
    except ConfigValidationError:
        raise
    except (TypeError, ValueError) as e:
        raise ConfigValidationError(f"invalid demographics section: {e}", key="demographics") from None
