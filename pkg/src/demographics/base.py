#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""
人口結構基類模組
定義所有人口情境（工作人口、撫養比）的共同介面
"""

from abc import ABC, abstractmethod
from typing import Any, Dict, Union

import numpy as np

from ..models.enums import DemographicKind
from ..models.errors import ConfigValidationError
from ..utils.logger import setup_logger

# 建立日誌器
logger = setup_logger(__name__)

TimeLike = Union[float, np.ndarray]


class DemographicSchedule(ABC):
    """人口情境基類 - N^w(t)、DR(t) 與 N^r(t) = DR(t)·N^w(t)"""

    kind: DemographicKind

    def __init__(self, n_workers: float = 100.0):
        """初始化人口情境"""
        if not n_workers > 0:
            raise ConfigValidationError("n_workers must be > 0", key="demographics.n_workers")
        self._n_workers = float(n_workers)
        self.name = self.__class__.__name__
        logger.debug(f"初始化人口情境: {self.name}")

    @abstractmethod
    def dr(self, t: TimeLike) -> TimeLike:
        """撫養比 DR(t)，接受純量或陣列"""

    @abstractmethod
    def to_dict(self) -> Dict[str, Any]:
        """序列化為情境文件的 demographics 區段"""

    def n_workers(self, t: TimeLike) -> TimeLike:
        """工作人口 N^w(t)（本專案中為常數）"""
        if np.ndim(t) == 0:
            return self._n_workers
        return np.full(np.shape(t), self._n_workers)

    def n_retirees(self, t: TimeLike) -> TimeLike:
        """退休人口 N^r(t)，允許非整數（視為密度）"""
        return self.dr(t) * self.n_workers(t)

    def validate_on_grid(self, times: np.ndarray):
        """確認網格上 DR 與工作人口均為正"""
        values = np.asarray(self.dr(times), dtype=float)
        if not np.all(np.isfinite(values)) or np.any(values <= 0.0):
            raise ConfigValidationError("dependency ratio must be > 0 on the whole grid",
                                        key="demographics")

    def __eq__(self, other: object) -> bool:
        return isinstance(other, DemographicSchedule) and self.to_dict() == other.to_dict()

    def __hash__(self) -> int:
        return hash(repr(sorted(self.to_dict().items(), key=lambda kv: kv[0])))

    def __repr__(self) -> str:
        return f"{self.name}({self.to_dict()})"
