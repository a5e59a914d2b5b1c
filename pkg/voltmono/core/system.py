# coding=utf-8
"""
电力系统模型

把网络、动态设备与负荷绑定成一个微分-代数系统：
    ẋ = F(x, V)
    diag(V̄)·Y·V = ḡ(x, V, V̄)

状态排列固定：设备按母线顺序排列，每台设备 [δ, ω, ℰ, ℰ_fd]。
"""

from dataclasses import dataclass, replace
from functools import cached_property
from typing import Dict, List, Sequence, Tuple

import numpy as np

from voltmono.devices.base import ANGLE, EXCITER, INTERNAL, N_STATES, SPEED, Device
from voltmono.devices.gfm import GridFormingConverter, GfmState, reactive_output
from voltmono.devices.load import DEFAULT_BREAK_VOLTAGE, load_injection
from voltmono.devices.sg import DEFAULT_OMEGA_S
from voltmono.network.admittance import NetworkModel
from voltmono.network.solver import DEFAULT_V_FLOOR, ComplexVoltageProfile, network_residual, solve_network
from voltmono.utils.errors import TopologyError, UnknownTargetError


@dataclass(frozen=True, eq=False)
class StateLayout:
    """状态向量排列"""

    labels: Tuple[str, ...]
    device_buses: Tuple[int, ...]
    angle_index: np.ndarray
    speed_index: np.ndarray
    internal_index: np.ndarray      # ℰ：E′q 或 E_vir
    exciter_index: np.ndarray       # ℰ_fd：E_fd 或 E_vir_fd

    @property
    def m(self) -> int:
        return len(self.labels)

    @property
    def voltage_index(self) -> np.ndarray:
        """电压子系统 [ℰ..., ℰ_fd...]"""
        return np.concatenate([self.internal_index, self.exciter_index])

    def index_of(self, label: str) -> int:
        try:
            return self.labels.index(label)
        except ValueError:
            raise UnknownTargetError(label)


@dataclass(frozen=True, eq=False)
class PowerSystem:
    """
    电力系统（不可变）

    事件通过 with_* 方法生成新的系统对象，原对象可在多个场景间共享。
    """

    network: NetworkModel
    devices: Tuple[Device, ...]
    load_power: np.ndarray          # 各母线恒功率负荷 P + jQ
    omega_s: float = DEFAULT_OMEGA_S
    load_break: float = DEFAULT_BREAK_VOLTAGE
    newton_tol: float = 1e-10
    max_iterations: int = 50
    v_floor: float = DEFAULT_V_FLOOR

    def __post_init__(self):
        buses = [d.bus for d in self.devices]
        if buses != sorted(buses) or len(set(buses)) != len(buses):
            raise TopologyError("设备必须按母线升序排列且每条母线至多一台")
        for bus in buses:
            if not 0 <= bus < self.network.n:
                raise TopologyError(f"设备母线 {bus} 越界")
        if np.shape(self.load_power) != (self.network.n,):
            raise TopologyError("负荷向量长度与母线数不一致")

    # ------------------------------------------------------------------
    # 结构
    # ------------------------------------------------------------------

    @property
    def n(self) -> int:
        return self.network.n

    @property
    def m(self) -> int:
        return N_STATES * len(self.devices)

    @cached_property
    def layout(self) -> StateLayout:
        labels: List[str] = []
        for device in self.devices:
            bus_label = self.network.buses[device.bus].label
            labels.extend(f"{name}@{bus_label}" for name in device.state_names)
        offsets = np.arange(len(self.devices)) * N_STATES
        return StateLayout(
            labels=tuple(labels),
            device_buses=tuple(d.bus for d in self.devices),
            angle_index=offsets + ANGLE,
            speed_index=offsets + SPEED,
            internal_index=offsets + INTERNAL,
            exciter_index=offsets + EXCITER,
        )

    def device_index(self, bus: int) -> int:
        """母线内部编号 → 设备序号"""
        for k, device in enumerate(self.devices):
            if device.bus == bus:
                return k
        raise UnknownTargetError(f"母线 {self.network.buses[bus].label} 上没有设备")

    def device_slice(self, k: int) -> slice:
        return slice(N_STATES * k, N_STATES * (k + 1))

    def device_shunt_terms(self) -> np.ndarray:
        terms = np.zeros(self.n, dtype=complex)
        for device in self.devices:
            terms[device.bus] = device.shunt_term()
        return terms

    # ------------------------------------------------------------------
    # 代数部分
    # ------------------------------------------------------------------

    def injections(self, x: np.ndarray, V: np.ndarray) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
        """各母线 ḡ 及对 V、V̄ 的偏导（对角）"""
        g, dg_dV, dg_dVbar = load_injection(self.load_power, V, self.load_break)
        for k, device in enumerate(self.devices):
            xs = x[self.device_slice(k)]
            b = device.bus
            g[b] += device.injection(xs, V[b])
            d_v, d_vbar, _ = device.injection_partials(xs, V[b])
            dg_dV[b] += d_v
            dg_dVbar[b] += d_vbar
        return g, dg_dV, dg_dVbar

    def residual(self, x: np.ndarray, V: np.ndarray) -> float:
        g, _, _ = self.injections(x, V)
        r = network_residual(self.network.Y, V, g)
        return float(np.max(np.abs(r))) if r.size else 0.0

    def solve(self, x: np.ndarray, V_guess: np.ndarray) -> ComplexVoltageProfile:
        """在给定设备状态下求解网络电压"""
        return solve_network(
            self.network,
            x,
            self.injections,
            V_guess,
            tol=self.newton_tol,
            max_iterations=self.max_iterations,
            v_floor=self.v_floor,
        )

    # ------------------------------------------------------------------
    # 微分部分
    # ------------------------------------------------------------------

    def rhs(self, x: np.ndarray, V: np.ndarray) -> np.ndarray:
        """ẋ = F(x, V)"""
        out = np.empty(self.m)
        for k, device in enumerate(self.devices):
            sl = self.device_slice(k)
            out[sl] = device.derivative(x[sl], V[device.bus], self.omega_s)
        return out

    def project_exciters(self, x: np.ndarray, V: np.ndarray) -> np.ndarray:
        """把 ℰ_fd 置于准稳态流形 K(V_ref − |V|) 上"""
        xp = np.array(x, dtype=float)
        for k, device in enumerate(self.devices):
            xp[N_STATES * k + EXCITER] = device.quasi_steady(V[device.bus])
        return xp

    def rhs_reduced(self, x: np.ndarray, V: np.ndarray) -> np.ndarray:
        """降阶模型：ℰ_fd 由准稳态流形代替，其导数置零"""
        f = self.rhs(self.project_exciters(x, V), V)
        f[self.layout.exciter_index] = 0.0
        return f

    def state_partials(self, x: np.ndarray, V: np.ndarray) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
        """
        组装全系统偏导

        Returns:
            (∂ḡ/∂x: n×m 复, ∂F/∂V: m×n 复, ∂F/∂x: m×m 实)
        """
        dg_dx = np.zeros((self.n, self.m), dtype=complex)
        dF_dV = np.zeros((self.m, self.n), dtype=complex)
        dF_dx = np.zeros((self.m, self.m))
        for k, device in enumerate(self.devices):
            sl = self.device_slice(k)
            b = device.bus
            p = device.partials(x[sl], V[b], self.omega_s)
            dg_dx[b, sl] = p.dg_dx
            dF_dV[sl, b] = p.dF_dV
            dF_dx[sl, sl] = p.dF_dx
        return dg_dx, dF_dV, dF_dx

    # ------------------------------------------------------------------
    # 派生量
    # ------------------------------------------------------------------

    def electrical_power(self, x: np.ndarray, V: np.ndarray) -> np.ndarray:
        """各设备 P_e = Re(ḡ)"""
        return np.array([
            float(d.injection(x[self.device_slice(k)], V[d.bus]).real)
            for k, d in enumerate(self.devices)
        ])

    def reactive_power(self, x: np.ndarray, V: np.ndarray) -> np.ndarray:
        """各设备输出无功 Q = −Im(ḡ)（变流器即 Q_c）"""
        out = []
        for k, d in enumerate(self.devices):
            xs = x[self.device_slice(k)]
            if isinstance(d, GridFormingConverter):
                out.append(reactive_output(d.params, GfmState.from_array(xs), V[d.bus]))
            else:
                out.append(float(-d.injection(xs, V[d.bus]).imag))
        return np.array(out)

    # ------------------------------------------------------------------
    # 变更
    # ------------------------------------------------------------------

    def with_network(self, network: NetworkModel) -> "PowerSystem":
        return replace(self, network=network)

    def with_device(self, k: int, device: Device) -> "PowerSystem":
        devices = list(self.devices)
        devices[k] = device
        return replace(self, devices=tuple(devices))

    def with_devices(self, devices: Sequence[Device]) -> "PowerSystem":
        return replace(self, devices=tuple(devices))

    def with_load(self, bus: int, S: complex) -> "PowerSystem":
        loads = np.array(self.load_power, dtype=complex)
        loads[bus] = S
        return replace(self, load_power=loads)

    def summary(self) -> Dict[str, int]:
        kinds: Dict[str, int] = {}
        for d in self.devices:
            kinds[d.kind] = kinds.get(d.kind, 0) + 1
        return {"buses": self.n, "branches": len(self.network.branches), "states": self.m, **kinds}
