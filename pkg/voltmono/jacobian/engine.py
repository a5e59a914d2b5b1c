# coding=utf-8
"""
轨迹雅可比计算模块

按链式法则计算闭环系统的轨迹雅可比：
    1. 由网络方程 diag(V̄)YV = ḡ(x, V, V̄) 组装
         A = diag(V̄)Y − ∂ḡ/∂V，B = diag(YV) − ∂ḡ/∂V̄，C = ∂ḡ/∂x
    2. 求电压灵敏度 ∂V/∂x：
         精确  [A − B·Ā⁻¹·B̄]⁻¹·[C − B·Ā⁻¹·C̄]
         近似  A⁻¹·C
    3. 全阶雅可比 J = 2·Re(∂F/∂V·∂V/∂x) + ∂F/∂x
    4. 降阶雅可比 J_r = J[ℰ,ℰ] + T_E⁻¹·T_Efd·J[ℰ_fd,ℰ]
"""

import warnings
from dataclasses import dataclass, replace
from enum import Enum
from typing import Any, Dict, Optional, Sequence, Tuple

import numpy as np
import scipy.linalg

from voltmono.core.system import PowerSystem
from voltmono.network.admittance import NetworkModel
from voltmono.network.solver import network_residual, stacked_real_jacobian
from voltmono.utils.errors import LowVoltageRegime, SingularSchurComplement, StaleVoltageProfile


class SensitivityMethod(str, Enum):
    EXACT = "exact"
    APPROXIMATE = "approximate"


@dataclass(frozen=True, eq=False)
class SensitivityBundle:
    """A、B、C 矩阵及求得的 ∂V/∂x"""

    A: np.ndarray
    B: np.ndarray
    C: np.ndarray
    dV_dx: Optional[np.ndarray] = None
    method: Optional[SensitivityMethod] = None
    approximation_error: Optional[float] = None

    def with_solution(self, dV_dx: np.ndarray, method: SensitivityMethod, error: Optional[float] = None):
        return replace(self, dV_dx=dV_dx, method=method, approximation_error=error)


@dataclass(frozen=True, eq=False)
class ReducedJacobian:
    """降阶模型雅可比及其非对角元符号"""

    matrix: np.ndarray
    labels: Tuple[str, ...]
    offdiag_sign: str               # nonnegative / nonpositive / mixed

    @property
    def offdiagonal(self) -> np.ndarray:
        return self.matrix[~np.eye(self.matrix.shape[0], dtype=bool)]


@dataclass(frozen=True, eq=False)
class JacobianReport:
    """某一时刻的雅可比快照"""

    J_full: np.ndarray
    J_reduced: np.ndarray
    dVmag_dE: np.ndarray            # n × p
    state_labels: Tuple[str, ...]
    reduced_labels: Tuple[str, ...]
    t: float = 0.0
    dVmag_dx: Optional[np.ndarray] = None
    approximation_error: Optional[float] = None

    def to_dict(self) -> Dict[str, Any]:
        return {
            "t": self.t,
            "state_labels": list(self.state_labels),
            "reduced_labels": list(self.reduced_labels),
            "J_full": self.J_full.tolist(),
            "J_reduced": self.J_reduced.tolist(),
            "dVmag_dE": self.dVmag_dE.tolist(),
        }


def assemble_abc(
    net: NetworkModel,
    all_device_partials: Tuple[np.ndarray, np.ndarray, np.ndarray],
    V: np.ndarray,
    injections: np.ndarray,
    tol: float = 1e-8,
) -> SensitivityBundle:
    """
    组装 A、B、C

    Args:
        net: 网络模型
        all_device_partials: (∂ḡ/∂V, ∂ḡ/∂V̄, ∂ḡ/∂x)，前两者为长度 n 的对角向量，后者 n×m
        V: 当前电压
        injections: 当前 ḡ
        tol: 电压有效性检查的残差容差

    Raises:
        StaleVoltageProfile: V 不满足网络方程
    """
    dg_dV, dg_dVbar, dg_dx = all_device_partials
    V = np.asarray(V, dtype=complex)
    r = network_residual(net.Y, V, injections)
    residual = float(np.max(np.abs(r))) if r.size else 0.0
    if residual > tol:
        raise StaleVoltageProfile(residual)

    Y = np.asarray(net.Y)
    A = np.conj(V)[:, None] * Y - np.diag(dg_dV)
    B = np.diag(Y @ V - dg_dVbar)
    return SensitivityBundle(A=A, B=B, C=np.asarray(dg_dx, dtype=complex))


def system_bundle(system: PowerSystem, x: np.ndarray, V: np.ndarray, tol: float = 1e-8) -> SensitivityBundle:
    """从系统对象收集偏导并组装 A、B、C"""
    g, dg_dV, dg_dVbar = system.injections(x, V)
    dg_dx, _, _ = system.state_partials(x, V)
    return assemble_abc(system.network, (dg_dV, dg_dVbar, dg_dx), V, g, tol)


def _solve(M: np.ndarray, rhs: np.ndarray, what: str) -> np.ndarray:
    """病态（rcond 低于机器精度）按奇异处理"""
    try:
        with warnings.catch_warnings():
            warnings.simplefilter("error", scipy.linalg.LinAlgWarning)
            out = scipy.linalg.solve(M, rhs)
    except (scipy.linalg.LinAlgError, scipy.linalg.LinAlgWarning) as e:
        raise SingularSchurComplement(f"{what} 奇异: {e}")
    if not np.all(np.isfinite(out)):
        raise SingularSchurComplement(f"{what} 奇异")
    return out


def voltage_sensitivity_exact(bundle: SensitivityBundle) -> np.ndarray:
    """
    精确电压灵敏度 ∂V/∂x = [A − B·Ā⁻¹·B̄]⁻¹·[C − B·Ā⁻¹·C̄]

    x 为实向量，∂V̄/∂x = conj(∂V/∂x)。

    Raises:
        SingularSchurComplement: 接近电压崩溃时
    """
    A, B, C = bundle.A, bundle.B, bundle.C
    if not np.any(B):
        return _solve(A, C, "A")
    A_bar = np.conj(A)
    rhs = np.hstack([np.conj(B), np.conj(C)])
    solved = _solve(A_bar, rhs, "Ā")
    n = A.shape[0]
    schur = A - B @ solved[:, :n]
    return _solve(schur, C - B @ solved[:, n:], "A − B·Ā⁻¹·B̄")


def voltage_sensitivity_approx(bundle: SensitivityBundle) -> np.ndarray:
    """近似电压灵敏度 ∂V/∂x ≈ A⁻¹·C（忽略 B·Ā⁻¹ 耦合项）"""
    return _solve(bundle.A, bundle.C, "A")


def approximation_error(approx: np.ndarray, exact: np.ndarray, dominant: float = 0.1) -> float:
    """主导元素（|exact| ≥ dominant·max|exact|）上的最大相对偏差"""
    mag = np.abs(exact)
    peak = float(np.max(mag)) if mag.size else 0.0
    if peak == 0.0:
        return float(np.max(np.abs(approx))) if approx.size else 0.0
    mask = mag >= dominant * peak
    return float(np.max(np.abs(approx[mask] - exact[mask]) / mag[mask]))


def solve_sensitivity(bundle: SensitivityBundle, method: SensitivityMethod = SensitivityMethod.EXACT) -> SensitivityBundle:
    """求解并附带近似质量指标"""
    exact = voltage_sensitivity_exact(bundle)
    if method == SensitivityMethod.EXACT:
        return bundle.with_solution(exact, method)
    approx = voltage_sensitivity_approx(bundle)
    return bundle.with_solution(approx, method, approximation_error(approx, exact))


def voltage_magnitude_sensitivity(dV_dx: np.ndarray, V: np.ndarray) -> np.ndarray:
    """
    电压幅值灵敏度 ∂|V_i|/∂x_j = Re(V_i·∂V̄_i/∂x_j)/|V_i|

    Raises:
        LowVoltageRegime: 存在零电压母线
    """
    V = np.asarray(V, dtype=complex)
    mag = np.abs(V)
    if np.any(mag == 0):
        bus = int(np.argmin(mag))
        raise LowVoltageRegime(bus, 0.0)
    return (V[:, None] * np.conj(dV_dx)).real / mag[:, None]


def compose_full(dF_dV: np.ndarray, dV_dx: np.ndarray, dF_dx: np.ndarray) -> np.ndarray:
    """J = 2·Re(∂F/∂V·∂V/∂x) + ∂F/∂x"""
    return 2.0 * (dF_dV @ dV_dx).real + dF_dx


def compose_reduced(system: PowerSystem, J_full: np.ndarray) -> np.ndarray:
    """J_r = J[ℰ,ℰ] + diag(T_Efd/T_E)·J[ℰ_fd,ℰ]"""
    layout = system.layout
    e_idx, f_idx = layout.internal_index, layout.exciter_index
    ratio = np.array([t_fd / t_e for t_e, t_fd in (d.time_constants() for d in system.devices)])
    return J_full[np.ix_(e_idx, e_idx)] + ratio[:, None] * J_full[np.ix_(f_idx, e_idx)]


def _offdiag_sign(J: np.ndarray, eps: float) -> str:
    off = J[~np.eye(J.shape[0], dtype=bool)]
    if off.size == 0 or np.all(off >= -eps):
        return "nonnegative"
    if np.all(off <= eps):
        return "nonpositive"
    return "mixed"


def trajectory_jacobian(
    system: PowerSystem,
    x: np.ndarray,
    V: np.ndarray,
    method: SensitivityMethod = SensitivityMethod.EXACT,
    t: float = 0.0,
) -> JacobianReport:
    """
    全阶轨迹雅可比

    Args:
        system: 电力系统
        x: 状态
        V: 与 x 一致的网络电压
        method: 电压灵敏度求法
        t: 快照时刻

    Returns:
        JacobianReport（含降阶雅可比与 ∂|V|/∂ℰ）
    """
    bundle = solve_sensitivity(system_bundle(system, x, V), method)
    _, dF_dV, dF_dx = system.state_partials(x, V)
    J_full = compose_full(dF_dV, bundle.dV_dx, dF_dx)
    dVmag_dx = voltage_magnitude_sensitivity(bundle.dV_dx, V)
    layout = system.layout
    return JacobianReport(
        J_full=J_full,
        J_reduced=compose_reduced(system, J_full),
        dVmag_dE=dVmag_dx[:, layout.internal_index],
        state_labels=layout.labels,
        reduced_labels=tuple(layout.labels[i] for i in layout.internal_index),
        t=t,
        dVmag_dx=dVmag_dx,
        approximation_error=bundle.approximation_error,
    )


def trajectory_jacobian_stacked(system: PowerSystem, x: np.ndarray, V: np.ndarray) -> np.ndarray:
    """
    全阶雅可比的实数展开实现（交叉校验用）

    [dp; dq] 由实数牛顿矩阵解出，∂F/∂V = a + jb 时 dF = 2(a·dp − b·dq)。
    """
    bundle = system_bundle(system, x, V)
    J_net = stacked_real_jacobian(bundle.A, bundle.B)
    rhs = np.vstack([bundle.C.real, bundle.C.imag])
    dpq = _solve(J_net, rhs, "实数牛顿矩阵")
    n = system.n
    dp, dq = dpq[:n], dpq[n:]
    _, dF_dV, dF_dx = system.state_partials(x, V)
    return 2.0 * (dF_dV.real @ dp - dF_dV.imag @ dq) + dF_dx


def reduced_jacobian(
    system: PowerSystem,
    x: np.ndarray,
    V: np.ndarray,
    eps_rel: float = 1e-9,
) -> ReducedJacobian:
    """
    降阶模型雅可比

    先把 ℰ_fd 投影到准稳态流形 K(V_ref − |V|)，再按时间常数比合成。
    """
    xp = system.project_exciters(x, V)
    report = trajectory_jacobian(system, xp, V)
    J = report.J_reduced
    eps = eps_rel * float(np.max(np.abs(J))) if J.size else 0.0
    return ReducedJacobian(matrix=J, labels=report.reduced_labels, offdiag_sign=_offdiag_sign(J, eps))


def reduced_input_matrix(system: PowerSystem) -> np.ndarray:
    """降阶模型对 V_ref 输入的 ∂f/∂v：同步机 K_A/T′d0，变流器 K_u/K_i"""
    return np.diag([d.reference_gain() for d in system.devices])


def output_matrix(system: PowerSystem, report: JacobianReport, buses: Optional[Sequence[int]] = None) -> np.ndarray:
    """以母线电压幅值为输出时的 ∂h/∂ℰ（默认取设备母线）"""
    if buses is None:
        buses = [d.bus for d in system.devices]
    return report.dVmag_dE[list(buses), :]
