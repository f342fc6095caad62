#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""
例外類別定義
模擬引擎各層共用的結構化錯誤
"""

from typing import Optional


class PensionSimError(Exception):
    """模擬引擎錯誤基類"""


class ConfigValidationError(PensionSimError, ValueError):
    """情境配置解析或驗證失敗"""

    def __init__(self, message: str, key: Optional[str] = None, line: Optional[int] = None):
        self.message = message
        self.key = key
        self.line = line
        location = []
        if key:
            location.append(f"key={key}")
        if line is not None:
            location.append(f"line={line}")
        suffix = f" ({', '.join(location)})" if location else ""
        super().__init__(f"{message}{suffix}")

    def __reduce__(self):
        return type(self), (self.message, self.key, self.line)


class CholeskyError(PensionSimError, ValueError):
    """相關係數矩陣非正定"""

    def __init__(self, pivot: int, value: float):
        self.pivot = pivot
        self.value = value
        super().__init__(
            f"correlation matrix is not positive definite: pivot {pivot} has value {value:.6g}"
        )

    def __reduce__(self):
        return type(self), (self.pivot, self.value)


class PathSimulationError(PensionSimError):
    """單一路徑模擬失敗（含路徑編號）"""

    def __init__(self, path_index: int, message: str):
        self.path_index = path_index
        self.message = message
        super().__init__(f"path {path_index}: {message}")

    def __reduce__(self):
        return type(self), (self.path_index, self.message)


class DivergenceError(PensionSimError):
    """SDE 交叉驗證與封閉解差距超出容許值"""

    def __init__(self, step: int, gap: float, tolerance: float):
        self.step = step
        self.gap = gap
        self.tolerance = tolerance
        super().__init__(
            f"relative gap {gap:.3e} exceeds tolerance {tolerance:.1e} at grid index {step}"
        )

    def __reduce__(self):
        return type(self), (self.step, self.gap, self.tolerance)


class UnboundedUtilityError(PensionSimError):
    """θ > 1 時在永續界限上評估效用（發散）"""


class EairDomainError(PensionSimError, ValueError):
    """EAIR 輸入現金流不合法"""
