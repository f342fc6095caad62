#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""並發處理優化器：結果順序、失敗處理與工作數"""

import pytest

from src.core.concurrent_optimizer import ConcurrentOptimizer, ResourceMonitor, Task


def _square(x):
    return x * x


def _fail_on_three(x):
    if x == 3:
        raise RuntimeError("three")
    return x


def test_results_keep_submission_order():
    tasks = [Task(id=f"t{i}", func=_square, args=(i,)) for i in range(6)]
    for workers in (1, 2):
        results = ConcurrentOptimizer(max_workers=workers).execute_batch(tasks)
        assert [r.task_id for r in results] == [f"t{i}" for i in range(6)]
        assert [r.result for r in results] == [i * i for i in range(6)]


def test_failures_are_reported():
    optimizer = ConcurrentOptimizer(max_workers=1)
    tasks = [Task(id=str(i), func=_fail_on_three, args=(i,)) for i in range(5)]
    results = optimizer.execute_batch(tasks, fail_fast=False)
    assert [r.success for r in results] == [True, True, True, False, True]
    assert isinstance(results[3].error, RuntimeError)
    stats = optimizer.get_stats()
    assert stats['failed_tasks'] == 1
    assert stats['success_rate'] == pytest.approx(0.8)


def test_fail_fast_raises():
    tasks = [Task(id=str(i), func=_fail_on_three, args=(i,)) for i in range(5)]
    with pytest.raises(RuntimeError):
        ConcurrentOptimizer(max_workers=1).execute_batch(tasks, fail_fast=True)


def test_worker_resolution():
    assert ConcurrentOptimizer(max_workers=4).resolve_workers(1) == 1
    assert 1 <= ResourceMonitor().get_optimal_workers(cap=2) <= 2
    assert ConcurrentOptimizer().execute_batch([]) == []
