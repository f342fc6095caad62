#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""
相關結構模組
四維布朗運動 B = (B^S, B^ν, B^r, B^e) 的相關係數矩陣與 Cholesky 分解
"""

from typing import Sequence

import numpy as np
from scipy.linalg import lapack

from ..models.errors import CholeskyError

FACTOR_NAMES = ('S', 'nu', 'r', 'e')
N_FACTORS = len(FACTOR_NAMES)


def build_gamma(rho_s_nu: float = 0.0, rho_s_r: float = 0.0, rho_s_e: float = 0.0,
                rho_nu_r: float = 0.0, rho_nu_e: float = 0.0, rho_r_e: float = 0.0) -> np.ndarray:
    """由六個兩兩相關係數組成 4x4 相關係數矩陣 Γ"""
    gamma = np.eye(N_FACTORS)
    pairs = {
        (0, 1): rho_s_nu, (0, 2): rho_s_r, (0, 3): rho_s_e,
        (1, 2): rho_nu_r, (1, 3): rho_nu_e, (2, 3): rho_r_e,
    }
    for (i, j), rho in pairs.items():
        gamma[i, j] = gamma[j, i] = float(rho)
    return gamma


def cholesky_factor(gamma: np.ndarray) -> np.ndarray:
    """
    計算相關係數矩陣的下三角 Cholesky 因子 L（Γ = L·ᵗL）

    Args:
        gamma: 對稱、單位對角線的正定矩陣

    Returns:
        對角線嚴格為正的下三角矩陣

    Raises:
        CholeskyError: 矩陣非正定，指出失敗的主元位置
        ValueError: 矩陣形狀、對稱性或對角線不合法
    """
    gamma = np.asarray(gamma, dtype=float)
    if gamma.ndim != 2 or gamma.shape[0] != gamma.shape[1]:
        raise ValueError(f"correlation matrix must be square, got shape {gamma.shape}")
    if not np.allclose(gamma, gamma.T, rtol=0.0, atol=1e-14):
        raise ValueError("correlation matrix must be symmetric")
    if not np.allclose(np.diag(gamma), 1.0, rtol=0.0, atol=1e-14):
        raise ValueError("correlation matrix must have a unit diagonal")
    if np.any(np.abs(gamma) > 1.0):
        raise ValueError("correlation entries must lie in [-1, 1]")

    chol, info = lapack.dpotrf(gamma, lower=1, clean=1)
    if info > 0:
        # LAPACK 回報第 info 階主子式非正（1 起算）
        pivot = int(info) - 1
        raise CholeskyError(pivot=pivot, value=float(chol[pivot, pivot]))
    if info < 0:
        raise ValueError(f"dpotrf rejected argument {-info}")
    return np.tril(chol)


def correlate_increments(chol: np.ndarray, z: np.ndarray) -> np.ndarray:
    """
    將獨立增量轉為相關增量 dB = L·z

    z 的最後一軸為因子軸（長度 4），其餘軸任意（步數、路徑）。
    逐項依固定順序累加，結果與批次大小無關。
    """
    z = np.asarray(z, dtype=float)
    chol = np.asarray(chol, dtype=float)
    out = np.zeros_like(z)
    for i in range(chol.shape[0]):
        for j in range(i + 1):
            if chol[i, j] != 0.0:
                out[..., i] += chol[i, j] * z[..., j]
    return out


def project_shocks(weights: np.ndarray, z: np.ndarray) -> np.ndarray:
    """Σ_j w_j·z_j（沿最後一軸，固定累加順序）"""
    z = np.asarray(z, dtype=float)
    out = np.zeros(z.shape[:-1])
    for j, w in enumerate(np.asarray(weights, dtype=float)):
        if w != 0.0:
            out += w * z[..., j]
    return out


def delta_loadings(chol: np.ndarray, delta: Sequence[float]) -> np.ndarray:
    """ᵗL·δ：效用波動在獨立布朗運動上的載荷"""
    return np.asarray(chol, dtype=float).T @ np.asarray(delta, dtype=float)
