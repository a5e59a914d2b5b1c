# coding=utf-8
"""
网络代数方程求解模块

求解 diag(V̄)·Y·V = ḡ(x, V, V̄)：ḡ 为各母线共轭注入功率（设备 + 负荷）。
牛顿法在实部/虚部展开的 2n 维实系统上迭代，V̄ 不作为独立未知量。
功率形式方程在 V = 0 处恒成立，迭代步因此取自等价的电流形式 Y·V = ḡ/V̄。
"""

from dataclasses import dataclass
from typing import Any, Callable, Tuple

import numpy as np
import scipy.linalg

from voltmono.network.admittance import NetworkModel
from voltmono.utils.errors import InvalidParameterError, NonConvergence, SingularNetworkJacobian

# injection_fn(device_states, V) -> (ḡ, ∂ḡ/∂V, ∂ḡ/∂V̄)，三个长度为 n 的复向量
InjectionFn = Callable[[Any, np.ndarray], Tuple[np.ndarray, np.ndarray, np.ndarray]]

# 低于此幅值的解视为 V = 0 伪解（金属性接地故障母线电压约 1e-3）
DEFAULT_V_FLOOR = 1e-6


@dataclass(frozen=True, eq=False)
class ComplexVoltageProfile:
    """网络求解结果"""

    V: np.ndarray
    iterations: int = 0
    residual: float = 0.0

    @property
    def Vbar(self) -> np.ndarray:
        return np.conj(self.V)

    @property
    def magnitude(self) -> np.ndarray:
        return np.abs(self.V)

    @property
    def angle(self) -> np.ndarray:
        return np.angle(self.V)


def network_residual(Y: np.ndarray, V: np.ndarray, g: np.ndarray) -> np.ndarray:
    """r = V̄∘(Y·V) − ḡ"""
    return np.conj(V) * (Y @ V) - g


def newton_matrices(
    Y: np.ndarray,
    V: np.ndarray,
    dg_dV: np.ndarray,
    dg_dVbar: np.ndarray,
) -> Tuple[np.ndarray, np.ndarray]:
    """
    残差对 V、V̄ 的偏导

    Returns:
        (A, B)，A = diag(V̄)Y − diag(∂ḡ/∂V)，B = diag(YV) − diag(∂ḡ/∂V̄)
    """
    A = np.conj(V)[:, None] * Y - np.diag(dg_dV)
    B = np.diag(Y @ V - dg_dVbar)
    return A, B


def stacked_real_jacobian(A: np.ndarray, B: np.ndarray) -> np.ndarray:
    """
    dr = A·dV + B·dV̄ 在 dV = dp + j·dq 下的实数形式

    dr = (A+B)·dp + j(A−B)·dq，返回 [[Re(A+B), −Im(A−B)], [Im(A+B), Re(A−B)]]
    """
    P = A + B
    M = A - B
    return np.block([[P.real, -M.imag], [P.imag, M.real]])


def current_newton_matrices(
    Y: np.ndarray,
    V: np.ndarray,
    g: np.ndarray,
    dg_dV: np.ndarray,
    dg_dVbar: np.ndarray,
) -> Tuple[np.ndarray, np.ndarray]:
    """
    电流形式失配 h = Y·V − ḡ/V̄ 对 V、V̄ 的偏导

    h = r / V̄，与功率形式同根，但不含 V = 0 这一伪解；牛顿步在电流形式上计算。

    Returns:
        (A, B)，A = Y − diag(∂ḡ/∂V / V̄)，B = diag(ḡ/V̄² − ∂ḡ/∂V̄ / V̄)
    """
    Vbar = np.conj(V)
    A = Y - np.diag(dg_dV / Vbar)
    B = np.diag(g / Vbar ** 2 - dg_dVbar / Vbar)
    return A, B


def solve_network(
    net: NetworkModel,
    device_states: Any,
    injection_fn: InjectionFn,
    V_guess: np.ndarray,
    tol: float = 1e-10,
    max_iterations: int = 50,
    v_floor: float = DEFAULT_V_FLOOR,
) -> ComplexVoltageProfile:
    """
    求解网络代数方程

    收敛判据用功率形式残差 r = V̄∘(YV) − ḡ；迭代步用电流形式失配计算。
    收敛到 min|V| < v_floor 的解视为伪解（功率形式在 V = 0 处恒成立）。

    Args:
        net: 网络模型（含故障导纳）
        device_states: 透传给 injection_fn 的设备状态
        injection_fn: 注入函数，返回 ḡ 及其对 V、V̄ 的偏导
        V_guess: 初值（暖启动时取上一步电压）
        tol: 残差 ∞-范数容差
        max_iterations: 最大迭代次数
        v_floor: 可接受的最小母线电压幅值

    Returns:
        ComplexVoltageProfile，residual ≤ tol

    Raises:
        NonConvergence: 迭代次数耗尽，或收敛到零电压伪解
        SingularNetworkJacobian: 牛顿矩阵奇异
    """
    V = np.array(V_guess, dtype=complex)
    if V.shape != (net.n,):
        raise InvalidParameterError(f"V_guess 长度 {V.shape} 与母线数 {net.n} 不一致")
    if np.any(V == 0):
        raise InvalidParameterError("V_guess 含零元素")

    n = net.n
    Y = net.Y
    residual = np.inf
    for iteration in range(max_iterations + 1):
        if np.any(V == 0):
            raise NonConvergence(iteration, residual, detail="迭代落在零电压")
        g, dg_dV, dg_dVbar = injection_fn(device_states, V)
        r = network_residual(Y, V, g)
        residual = float(np.max(np.abs(r))) if n else 0.0
        if residual <= tol:
            vmin = float(np.min(np.abs(V))) if n else np.inf
            if vmin < v_floor:
                raise NonConvergence(iteration, residual, detail=f"电压幅值 {vmin:.3e} 低于下限 {v_floor:.1e}")
            return ComplexVoltageProfile(V=V, iterations=iteration, residual=residual)
        if iteration == max_iterations:
            break

        A, B = current_newton_matrices(Y, V, g, dg_dV, dg_dVbar)
        J = stacked_real_jacobian(A, B)
        h = r / np.conj(V)
        rhs = -np.concatenate([h.real, h.imag])
        try:
            step = scipy.linalg.solve(J, rhs, check_finite=False)
        except scipy.linalg.LinAlgError as e:
            raise SingularNetworkJacobian(f"网络方程雅可比矩阵奇异: {e}")
        if not np.all(np.isfinite(step)):
            raise SingularNetworkJacobian()
        V = V + step[:n] + 1j * step[n:]

    raise NonConvergence(max_iterations, residual)
