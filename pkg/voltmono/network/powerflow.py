# coding=utf-8
"""
潮流计算模块

极坐标牛顿-拉夫逊潮流，供平衡点初始化使用。
母线分为平衡节点 (V, θ)、PV 节点 (P, V) 与 PQ 节点 (P, Q)。
"""

from dataclasses import dataclass
from typing import Sequence

import numpy as np
import scipy.linalg

from voltmono.network.admittance import NetworkModel
from voltmono.utils.errors import PowerFlowDiverged


@dataclass(frozen=True, eq=False)
class PowerFlowResult:
    """潮流结果"""

    V: np.ndarray                   # 复电压
    S: np.ndarray                   # 各母线净注入功率 V·conj(YV)
    iterations: int
    mismatch: float


def _dS_dV(Y: np.ndarray, V: np.ndarray):
    """S = V∘conj(YV) 对相角与幅值的偏导"""
    I = Y @ V
    Vnorm = V / np.abs(V)
    diagV = np.diag(V)
    dS_dVm = diagV @ np.conj(Y @ np.diag(Vnorm)) + np.diag(np.conj(I) * Vnorm)
    dS_dVa = 1j * diagV @ np.conj(np.diag(I) - Y @ diagV)
    return dS_dVa, dS_dVm


def run_power_flow(
    net: NetworkModel,
    p_spec: Sequence[float],
    q_spec: Sequence[float],
    v_set: Sequence[float],
    pv_buses: Sequence[int],
    tol: float = 1e-11,
    max_iterations: int = 30,
    quiet: bool = True,
) -> PowerFlowResult:
    """
    牛顿-拉夫逊潮流

    Args:
        net: 网络模型（恒阻抗负荷已并入 Y）
        p_spec: 各母线净注入有功（发电 − 负荷，标幺）
        q_spec: 各母线净注入无功（仅 PQ 节点有效）
        v_set: 各母线电压设定（平衡节点与 PV 节点有效，其余作为初值）
        pv_buses: PV 节点列表（不含平衡节点）
        tol: 最大功率不平衡容差
        max_iterations: 最大迭代次数
        quiet: 是否静默

    Returns:
        PowerFlowResult

    Raises:
        PowerFlowDiverged: 未收敛
    """
    n = net.n
    Y = np.asarray(net.Y)
    p_spec = np.asarray(p_spec, dtype=float)
    q_spec = np.asarray(q_spec, dtype=float)
    Vm = np.asarray(v_set, dtype=float).copy()
    Vm[Vm <= 0] = 1.0
    Va = np.zeros(n)

    pv = sorted(set(int(b) for b in pv_buses) - {net.slack})
    pq = [i for i in range(n) if i != net.slack and i not in pv]
    pvpq = pv + pq
    s_spec = p_spec + 1j * q_spec

    mismatch = np.inf
    for iteration in range(max_iterations + 1):
        V = Vm * np.exp(1j * Va)
        S = V * np.conj(Y @ V)
        dS = S - s_spec
        F = np.concatenate([dS.real[pvpq], dS.imag[pq]])
        mismatch = float(np.max(np.abs(F))) if F.size else 0.0
        if mismatch <= tol:
            if not quiet:
                print(f"[潮流] 收敛，迭代 {iteration} 次，最大不平衡 {mismatch:.2e}")
            return PowerFlowResult(V=V, S=S, iterations=iteration, mismatch=mismatch)
        if iteration == max_iterations:
            break

        dS_dVa, dS_dVm = _dS_dV(Y, V)
        J = np.block([
            [dS_dVa.real[np.ix_(pvpq, pvpq)], dS_dVm.real[np.ix_(pvpq, pq)]],
            [dS_dVa.imag[np.ix_(pq, pvpq)], dS_dVm.imag[np.ix_(pq, pq)]],
        ])
        try:
            dx = scipy.linalg.solve(J, F)
        except scipy.linalg.LinAlgError:
            break
        npvpq = len(pvpq)
        Va[pvpq] -= dx[:npvpq]
        Vm[pq] -= dx[npvpq:]

    raise PowerFlowDiverged(max_iterations, float(mismatch))
