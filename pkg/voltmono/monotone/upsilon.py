# coding=utf-8
"""
切负荷输入-输出单调性扫描

两次仿真共享同一平衡点，仅切除的无功量不同（v1 ≥ v2）。对选定时刻，沿同伦
    x_σ = φ2 + σ(φ1 − φ2)，v_σ = v2 + σ(v1 − v2)，σ ∈ [0, 1]
计算
    Υ′(σ) = ∂h/∂x(x_σ, v_σ)·(φ1 − φ2) + ∂h/∂v(x_σ, v_σ)·(v1 − v2)
其中 h 为输出母线电压幅值。Υ′ 在整个网格上为正即说明 y1 − y2 = ∫₀¹Υ′dσ > 0。

∂h/∂x 用精确电压灵敏度，∂h/∂v 用网络重解的中心差分。
"""

from dataclasses import dataclass
from typing import Any, Dict, Optional, Sequence, Tuple

import numpy as np
import scipy.integrate

from voltmono.core.system import PowerSystem
from voltmono.jacobian.engine import system_bundle, voltage_magnitude_sensitivity, voltage_sensitivity_exact
from voltmono.simulation.events import Event, EventKind, Scenario
from voltmono.simulation.initializer import Equilibrium
from voltmono.utils.errors import InvalidParameterError


@dataclass(frozen=True, eq=False)
class UpsilonScan:
    """Υ′ 扫描结果"""

    sigma: np.ndarray                   # σ 网格
    times: np.ndarray                   # 实际采样时刻
    output_buses: Tuple[str, ...]
    upsilon_prime: np.ndarray           # 时刻 × 输出母线 × σ
    min_value: float
    integral_values: np.ndarray         # 时刻 × 输出母线，∫₀¹Υ′dσ（梯形）
    output_gap: np.ndarray              # 时刻 × 输出母线，y1 − y2
    shed_v1: float = 0.0
    shed_v2: float = 0.0
    refinement_change: Optional[float] = None

    @property
    def integral_lower_bound(self) -> float:
        """min Υ′ ·(1 − 0)"""
        return self.min_value * 1.0

    @property
    def positive(self) -> bool:
        return self.min_value > 0

    def identity_error(self) -> float:
        """梯形积分与输出差的最大偏差"""
        if self.output_gap.size == 0:
            return 0.0
        return float(np.max(np.abs(self.integral_values - self.output_gap)))

    def to_dict(self) -> Dict[str, Any]:
        return {
            "shed_v1": self.shed_v1,
            "shed_v2": self.shed_v2,
            "sigma_steps": int(len(self.sigma) - 1),
            "times": [float(t) for t in self.times],
            "output_buses": list(self.output_buses),
            "min_value": self.min_value,
            "integral_lower_bound": self.integral_lower_bound,
            "positive": self.positive,
            "identity_error": self.identity_error(),
            "refinement_change": self.refinement_change,
            "sigma": self.sigma.tolist(),
            "upsilon_prime": self.upsilon_prime.tolist(),
            "integral_values": self.integral_values.tolist(),
            "output_gap": self.output_gap.tolist(),
        }


def _shed_system(system: PowerSystem, bus: int, base_load: complex, shed: float) -> PowerSystem:
    return system.with_load(bus, base_load - 1j * shed)


def _dh_dv(
    system: PowerSystem,
    bus: int,
    base_load: complex,
    shed: float,
    x: np.ndarray,
    V: np.ndarray,
    outputs: Sequence[int],
    step: float,
) -> np.ndarray:
    """∂|V_out|/∂v 的中心差分"""
    V_hi = _shed_system(system, bus, base_load, shed + step).solve(x, V).V
    V_lo = _shed_system(system, bus, base_load, shed - step).solve(x, V).V
    return (np.abs(V_hi[outputs]) - np.abs(V_lo[outputs])) / (2.0 * step)


def _scan_grid(
    system: PowerSystem,
    bus: int,
    base_load: complex,
    v1: float,
    v2: float,
    phi1: np.ndarray,
    phi2: np.ndarray,
    V_start: np.ndarray,
    outputs: Sequence[int],
    sigma: np.ndarray,
    fd_step: float,
) -> np.ndarray:
    """单个时刻的 Υ′(σ)，形状 输出母线 × σ"""
    dx = phi1 - phi2
    dv = v1 - v2
    out = np.zeros((len(outputs), len(sigma)))
    V_guess = V_start
    for j, s in enumerate(sigma):
        x_s = phi2 + s * dx
        v_s = v2 + s * dv
        sys_s = _shed_system(system, bus, base_load, v_s)
        V_s = sys_s.solve(x_s, V_guess).V
        V_guess = V_s
        dV_dx = voltage_sensitivity_exact(system_bundle(sys_s, x_s, V_s))
        dh_dx = voltage_magnitude_sensitivity(dV_dx, V_s)[outputs, :]
        dh_dv = _dh_dv(system, bus, base_load, v_s, x_s, V_s, outputs, fd_step)
        out[:, j] = dh_dx @ dx + dh_dv * dv
    return out


def upsilon_scan(
    equilibrium: Equilibrium,
    bus: int,
    shed_v1: float,
    shed_v2: float,
    t_samples: Sequence[float],
    sigma_steps: int = 20,
    dt: float = 1e-3,
    output_buses: Optional[Sequence[int]] = None,
    fd_step: float = 1e-4,
    refine: bool = False,
    quiet: bool = True,
) -> UpsilonScan:
    """
    对两种切负荷量做 Υ′ 扫描

    Args:
        equilibrium: 共享的初始平衡点
        bus: 切负荷母线（内部编号）
        shed_v1: 较大的无功切除量（标幺）
        shed_v2: 较小的无功切除量（标幺）
        t_samples: 检查时刻（取最近的网格点）
        sigma_steps: σ 网格段数
        dt: 仿真步长
        output_buses: 输出母线（内部编号），默认取切负荷母线
        fd_step: ∂h/∂v 差分步长
        refine: 是否用 2·sigma_steps 复算并报告最小值的相对变化
        quiet: 是否静默

    Returns:
        UpsilonScan

    Raises:
        InvalidParameterError: shed_v1 < shed_v2、sigma_steps < 1 或时刻非法
        SimulationError: 任一仿真失败
    """
    from voltmono.simulation.runner import run

    if shed_v1 < shed_v2:
        raise InvalidParameterError(f"要求 shed_v1 ≥ shed_v2，实际 {shed_v1} < {shed_v2}")
    if sigma_steps < 1:
        raise InvalidParameterError("sigma_steps 必须 ≥ 1")
    t_samples = [float(t) for t in t_samples]
    if not t_samples or min(t_samples) < 0:
        raise InvalidParameterError("t_samples 不能为空且必须非负")

    system = equilibrium.system
    if not 0 <= bus < system.n:
        raise InvalidParameterError(f"母线 {bus} 越界")
    outputs = [bus] if output_buses is None else [int(b) for b in output_buses]
    base_load = complex(system.load_power[bus])
    t_end = max(max(t_samples), dt)

    def scenario(shed: float) -> Scenario:
        event = Event(time=0.0, kind=EventKind.LOAD_SHED, bus=bus, dq=shed)
        return Scenario(name=f"shed_{shed:g}", events=(event,), t_end=t_end, dt=dt)

    run1 = run(scenario(shed_v1), equilibrium, raise_on_failure=True)
    run2 = run(scenario(shed_v2), equilibrium, raise_on_failure=True)

    def scan(steps: int) -> Tuple[np.ndarray, np.ndarray]:
        sigma = np.linspace(0.0, 1.0, steps + 1)
        values = []
        for t in t_samples:
            i = run2.sample_at(t)
            values.append(_scan_grid(
                system, bus, base_load, shed_v1, shed_v2,
                run1.states[i], run2.states[i], run2.voltages[i],
                outputs, sigma, fd_step,
            ))
        return sigma, np.array(values)

    sigma, upsilon = scan(sigma_steps)
    min_value = float(np.min(upsilon))

    refinement = None
    if refine:
        _, fine = scan(2 * sigma_steps)
        fine_min = float(np.min(fine))
        refinement = abs(fine_min - min_value) / max(abs(min_value), 1e-300)

    idx = [run2.sample_at(t) for t in t_samples]
    gap = np.abs(run1.voltages[idx][:, outputs]) - np.abs(run2.voltages[idx][:, outputs])
    integral = scipy.integrate.trapezoid(upsilon, sigma, axis=2)
    labels = tuple(system.network.buses[b].label for b in outputs)

    if not quiet:
        print(f"[分析] Υ′ 扫描: {len(t_samples)} 个时刻 × {len(sigma)} 个 σ 点, min = {min_value:.4e}")

    return UpsilonScan(
        sigma=sigma,
        times=np.asarray(run2.times)[idx],
        output_buses=labels,
        upsilon_prime=upsilon,
        min_value=min_value,
        integral_values=integral,
        output_gap=gap,
        shed_v1=float(shed_v1),
        shed_v2=float(shed_v2),
        refinement_change=refinement,
    )
