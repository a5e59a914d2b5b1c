# coding=utf-8
"""
负荷模型

恒功率负荷带低电压折断：|V| ≥ V_b 时消耗 S_L = P + jQ；
|V| < V_b 时按 (|V|/V_b)² 缩减（退化为恒阻抗），保证故障期间网络方程可解。
恒阻抗负荷直接并入 Y，不经过本模块。
"""

from typing import Tuple

import numpy as np

DEFAULT_BREAK_VOLTAGE = 0.7


def load_injection(
    S_load: np.ndarray,
    V: np.ndarray,
    v_break: float = DEFAULT_BREAK_VOLTAGE,
) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    """
    负荷的共轭注入功率及偏导（逐母线向量化）

    注入功率为 −S_L·s(|V|)，故 ḡ = −conj(S_L)·s(|V|)。

    Args:
        S_load: 各母线负荷功率 P + jQ（标幺）
        V: 母线电压
        v_break: 折断电压

    Returns:
        (ḡ, ∂ḡ/∂V, ∂ḡ/∂V̄)
    """
    S_load = np.asarray(S_load, dtype=complex)
    V = np.asarray(V, dtype=complex)
    coef = -np.conj(S_load)
    low = np.abs(V) < v_break
    inv_b2 = 1.0 / (v_break * v_break)

    scale = np.where(low, (V * np.conj(V)).real * inv_b2, 1.0)
    g = coef * scale
    dg_dV = np.where(low, coef * np.conj(V) * inv_b2, 0.0)
    dg_dVbar = np.where(low, coef * V * inv_b2, 0.0)
    return g, dg_dV.astype(complex), dg_dVbar.astype(complex)


def consumed_power(S_load: np.ndarray, V: np.ndarray, v_break: float = DEFAULT_BREAK_VOLTAGE) -> np.ndarray:
    """实际消耗功率 S_L·s(|V|)"""
    g, _, _ = load_injection(S_load, V, v_break)
    return -np.conj(g)
