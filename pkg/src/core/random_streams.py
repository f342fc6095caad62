#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""
亂數串流模組
以 (master_seed, path_index) 為鍵的計數器式亂數產生器，路徑結果與排程無關
"""

from typing import Sequence

import numpy as np

from .correlation import N_FACTORS


def path_generator(master_seed: int, path_index: int) -> np.random.Generator:
    """第 path_index 條路徑專屬的 Philox 產生器"""
    seq = np.random.SeedSequence([int(master_seed), int(path_index)])
    return np.random.Generator(np.random.Philox(seq))


def path_normals(master_seed: int, path_index: int, n_steps: int) -> np.ndarray:
    """
    單一路徑的獨立標準常態抽樣

    Returns:
        形狀 (n_steps, 4) 的陣列，依步數優先、因子次之的順序抽取
    """
    return path_generator(master_seed, path_index).standard_normal((n_steps, N_FACTORS))


def batch_normals(master_seed: int, path_indices: Sequence[int], n_steps: int) -> np.ndarray:
    """
    多條路徑的抽樣，堆疊為形狀 (n_steps, n_paths, 4)

    第 k 欄與 path_normals(master_seed, path_indices[k], n_steps) 逐位元相同。
    """
    draws = [path_normals(master_seed, k, n_steps) for k in path_indices]
    return np.stack(draws, axis=1)
