#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""
枚舉類型定義
包含系統中使用的各種枚舉值
"""

from enum import Enum


class DemographicKind(Enum):
    """人口結構情境"""
    STEADY_STATE = "steady_state"
    LINEAR_RAMP = "linear_ramp"
    CUSTOM = "custom"


class OmegaKind(Enum):
    """退休者跨世代權重"""
    EQUAL_WEIGHT = "equal_weight"
    DR_RATIO = "dr_ratio"


class SweepParameter(Enum):
    """敏感度分析可掃描的參數"""
    ZU0 = "zu0"
    THETA = "theta"
    F0 = "f0"
    LAMBDA = "lambda"
    DELTA_VECTOR = "delta"
    OMEGA_KIND = "omega_kind"
    DEMOGRAPHIC_KIND = "demographic_kind"


class ErrorPolicy(Enum):
    """路徑錯誤處理策略"""
    FAIL_FAST = "fail_fast"
    SKIP_AND_REPORT = "skip_and_report"


class Conditioning(Enum):
    """統計條件集合"""
    UNCONDITIONAL = "unconditional"
    SOLVENT = "solvent"
    DEPLETED = "depleted"


class PresetPath(Enum):
    """具名單一路徑情境"""
    OPTIMISTIC = "optimistic"
    PESSIMISTIC = "pessimistic"
