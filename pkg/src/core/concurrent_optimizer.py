#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""
並發處理優化器
依資源狀況決定工作進程數，批次執行任務並依提交順序合併結果
"""

import os
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Any, Callable, Dict, List, Optional

import psutil

from ..utils.logger import setup_logger

# 建立日誌器
logger = setup_logger(__name__)


@dataclass
class Task:
    """任務物件"""
    id: str
    func: Callable
    args: tuple = ()
    kwargs: Dict[str, Any] = field(default_factory=dict)


@dataclass
class TaskResult:
    """任務結果（依提交順序排列）"""
    task_id: str
    result: Any = None
    success: bool = True
    error: Optional[BaseException] = None
    execution_time: float = 0.0


class ResourceMonitor:
    """資源監控器"""

    def get_current_stats(self) -> Dict[str, Any]:
        """獲取當前統計資訊"""
        memory = psutil.virtual_memory()
        return {
            'cpu_count': psutil.cpu_count(logical=False) or psutil.cpu_count() or 1,
            'logical_cpu_count': psutil.cpu_count() or 1,
            'memory_percent': memory.percent,
            'memory_available_gb': memory.available / (1024 ** 3),
        }

    def get_optimal_workers(self, cap: Optional[int] = None) -> int:
        """根據資源狀況獲取最佳工作數（實體核心數，記憶體吃緊時減半）"""
        stats = self.get_current_stats()
        workers = stats['cpu_count']
        if stats['memory_percent'] > 85:
            workers = max(workers // 2, 1)
        if cap is not None:
            workers = min(workers, int(cap))
        return max(workers, 1)


class ConcurrentOptimizer:
    """並發處理優化器"""

    def __init__(self, max_workers: Optional[int] = None):
        """初始化並發優化器"""
        self.resource_monitor = ResourceMonitor()
        self.max_workers = max_workers
        self.stats = {
            'total_tasks': 0,
            'completed_tasks': 0,
            'failed_tasks': 0,
            'total_execution_time': 0.0,
        }
        logger.debug("並發處理優化器初始化完成")

    def resolve_workers(self, n_tasks: int) -> int:
        """實際使用的工作數（不超過任務數）"""
        workers = self.resource_monitor.get_optimal_workers(self.max_workers)
        return max(min(workers, n_tasks), 1)

    def execute_batch(self, tasks: List[Task], fail_fast: bool = True) -> List[TaskResult]:
        """
        批量執行任務

        結果依任務提交順序回傳，與工作數及完成順序無關。

        Args:
            tasks: 任務列表
            fail_fast: 遇到第一個（依順序）失敗的任務即拋出例外

        Returns:
            任務結果列表
        """
        if not tasks:
            return []

        workers = self.resolve_workers(len(tasks))
        self.stats['total_tasks'] += len(tasks)
        start = time.time()

        if workers == 1:
            results = [self._run_inline(task, fail_fast) for task in tasks]
        else:
            logger.info(f"⚙️ 以 {workers} 個工作進程執行 {len(tasks)} 個任務")
            with ProcessPoolExecutor(max_workers=workers) as executor:
                futures = [executor.submit(task.func, *task.args, **task.kwargs) for task in tasks]
                results = []
                for task, future in zip(tasks, futures):
                    try:
                        results.append(TaskResult(task_id=task.id, result=future.result()))
                        self.stats['completed_tasks'] += 1
                    except Exception as e:
                        self.stats['failed_tasks'] += 1
                        logger.error(f"任務 {task.id} 失敗: {e}")
                        if fail_fast:
                            for pending in futures:
                                pending.cancel()
                            raise
                        results.append(TaskResult(task_id=task.id, success=False, error=e))

        elapsed = time.time() - start
        self.stats['total_execution_time'] += elapsed
        logger.debug(f"批次完成：{len(tasks)} 個任務，耗時 {elapsed:.2f}s")
        return results

    def _run_inline(self, task: Task, fail_fast: bool) -> TaskResult:
        start = time.time()
        try:
            result = task.func(*task.args, **task.kwargs)
        except Exception as e:
            self.stats['failed_tasks'] += 1
            logger.error(f"任務 {task.id} 失敗: {e}")
            if fail_fast:
                raise
            return TaskResult(task_id=task.id, success=False, error=e)
        self.stats['completed_tasks'] += 1
        return TaskResult(task_id=task.id, result=result, execution_time=time.time() - start)

    def get_stats(self) -> Dict[str, Any]:
        """獲取統計資訊"""
        stats = self.stats.copy()
        processed = stats['completed_tasks'] + stats['failed_tasks']
        stats['success_rate'] = stats['completed_tasks'] / processed if processed else 0
        stats['pid'] = os.getpid()
        return stats
