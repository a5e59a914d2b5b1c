# coding=utf-8
"""
平衡点初始化

流程：
    1. 潮流计算得到各母线电压与净注入
    2. 由设备母线的注入功率反推设备状态与参考值（V_ref、P_m / P_ref、Q_ref）
    3. 整体旋转相角，使设备功角关于 0 对称
    4. 在设备状态下重解网络并校验状态导数
"""

from dataclasses import dataclass
from typing import Any, Dict, Optional

import numpy as np

from voltmono.cases.parser import CaseFile, PowerFlowSpec, build_system
from voltmono.core.system import PowerSystem
from voltmono.devices.load import consumed_power
from voltmono.network.powerflow import PowerFlowResult, run_power_flow
from voltmono.utils.errors import EquilibriumResidualTooLarge

# 旋转后功角允许的最大分布宽度（保证 |δ| ≤ π/4）
MAX_ANGLE_SPREAD = np.pi / 2


@dataclass(frozen=True, eq=False)
class Equilibrium:
    """平衡点：系统（参考值已回填）、状态与网络电压"""

    system: PowerSystem
    x: np.ndarray
    V: np.ndarray
    power_flow: PowerFlowResult
    rotation: float = 0.0
    derivative_norm: float = 0.0

    @property
    def states(self) -> np.ndarray:
        return self.x

    def summary(self) -> Dict[str, Any]:
        layout = self.system.layout
        return {
            "power_flow_iterations": self.power_flow.iterations,
            "power_flow_mismatch": self.power_flow.mismatch,
            "rotation": self.rotation,
            "derivative_norm": self.derivative_norm,
            "max_abs_angle": float(np.max(np.abs(self.x[layout.angle_index]))) if self.system.devices else 0.0,
            "vmag_min": float(np.min(np.abs(self.V))),
            "vmag_max": float(np.max(np.abs(self.V))),
        }


def initialize_system(
    system: PowerSystem,
    pf_input: PowerFlowSpec,
    tol: float = 1e-8,
    quiet: bool = True,
) -> Equilibrium:
    """
    由潮流输入初始化已构建的系统

    Raises:
        PowerFlowDiverged: 潮流不收敛
        EquilibriumResidualTooLarge: 功角分布过宽或状态导数超出 tol
    """
    pf = run_power_flow(system.network, pf_input.p_spec, pf_input.q_spec, pf_input.v_set, pf_input.pv_buses, quiet=quiet)
    V = np.array(pf.V, dtype=complex)

    # 设备注入 = 网络净注入 + 本母线恒功率负荷
    S_device = pf.S + consumed_power(system.load_power, V, system.load_break)

    x = np.zeros(system.m)
    devices = []
    for k, device in enumerate(system.devices):
        xs, updated = device.initialize(V[device.bus], complex(S_device[device.bus]))
        x[system.device_slice(k)] = xs
        devices.append(updated)
    system = system.with_devices(devices)

    rotation = 0.0
    if system.devices:
        angles = x[system.layout.angle_index]
        spread = float(np.max(angles) - np.min(angles))
        if spread > MAX_ANGLE_SPREAD:
            raise EquilibriumResidualTooLarge(spread, detail=f"功角分布 {spread:.3f} rad 超过 π/2")
        rotation = -0.5 * float(np.max(angles) + np.min(angles))
        x[system.layout.angle_index] += rotation
        V = V * np.exp(1j * rotation)

    V = system.solve(x, V).V
    norm = float(np.max(np.abs(system.rhs(x, V)))) if system.m else 0.0
    if norm > tol:
        raise EquilibriumResidualTooLarge(norm)

    if not quiet:
        print(f"[初始化] 平衡点就绪: {system.m} 个状态, 相角旋转 {rotation:+.4f} rad, 导数范数 {norm:.2e}")
    return Equilibrium(system=system, x=x, V=V, power_flow=pf, rotation=rotation, derivative_norm=norm)


def init_equilibrium(
    case: CaseFile,
    config: Optional[Dict[str, Any]] = None,
    quiet: bool = True,
) -> Equilibrium:
    """
    算例平衡点初始化

    Args:
        case: 算例
        config: 配置字典（取 NETWORK 与 SIMULATION.EQUILIBRIUM_TOL）
        quiet: 是否静默

    Returns:
        Equilibrium

    Raises:
        PowerFlowDiverged: 潮流不收敛
        EquilibriumResidualTooLarge: 状态导数超出容差
    """
    system, pf_input = build_system(case, config)
    tol = float((config or {}).get("SIMULATION", {}).get("EQUILIBRIUM_TOL", 1e-8))
    return initialize_system(system, pf_input, tol=tol, quiet=quiet)
