# coding=utf-8
"""
构网型变流器模型

虚拟内电势 E_vir∠δ 经耦合电抗 x_l 接入母线，带无功环与电压环：

    ḡ = −j/x_l·(E_vir·V̄·e^{jδ} − |V|²)
    Q_c = −Im(ḡ)
    K_i·Ė_vir = K_q(Q_ref − Q_c) + E_vir_fd
    T_w·Ė_vir_fd = K_u(V_ref − |V|) − E_vir_fd
    δ̇ = ω_s·ω，2H_vir·ω̇ = P_ref − P_e − (K_d + D_vir)·ω
"""

from dataclasses import dataclass, field, replace
from typing import Tuple

import numpy as np

from voltmono.devices.base import (
    ANGLE,
    EXCITER,
    INTERNAL,
    SPEED,
    Device,
    check_voltage,
    magnitude_partial,
)
from voltmono.devices.sg import DEFAULT_OMEGA_S
from voltmono.utils.errors import ValidationError

# 默认参数：K_i, K_d, T_w, K_u 与常用构网型变流器整定一致，x_l、K_q 为典型值
DEFAULT_X_L = 0.1
DEFAULT_K_Q = 0.1


@dataclass(frozen=True)
class GfmParams:
    """构网型变流器参数（系统基准标幺值）"""

    x_l: float = DEFAULT_X_L
    K_i: float = 0.1
    K_d: float = 5.0
    T_w: float = 0.02
    K_u: float = 1.0
    K_q: float = DEFAULT_K_Q
    H_vir: float = 5.0
    D_vir: float = 0.0
    V_ref: float = 1.0
    Q_ref: float = 0.0
    P_ref: float = 0.0

    def __post_init__(self):
        if not self.x_l > 0:
            raise ValidationError("x_l", "必须大于 0")
        if not self.K_i > 0:
            raise ValidationError("K_i", "必须大于 0")
        if not self.T_w > 0:
            raise ValidationError("T_w", "必须大于 0")
        if self.K_u < 0:
            raise ValidationError("K_u", "不能为负")
        if self.K_q < 0:
            raise ValidationError("K_q", "不能为负")
        if not self.H_vir > 0:
            raise ValidationError("H_vir", "必须大于 0")

    @property
    def damping(self) -> float:
        """虚拟摇摆总阻尼 K_d + D_vir"""
        return self.K_d + self.D_vir


@dataclass(frozen=True)
class GfmState:
    """构网型变流器状态"""

    delta: float
    omega: float
    e_vir: float
    e_vir_fd: float

    def to_array(self) -> np.ndarray:
        return np.array([self.delta, self.omega, self.e_vir, self.e_vir_fd], dtype=float)

    @classmethod
    def from_array(cls, x) -> "GfmState":
        return cls(delta=float(x[ANGLE]), omega=float(x[SPEED]), e_vir=float(x[INTERNAL]), e_vir_fd=float(x[EXCITER]))


def gfm_injection(params: GfmParams, state: GfmState, V: complex) -> complex:
    """
    构网型变流器共轭注入功率

    Examples:
        δ = 0, V = 1, E_vir = 1.05, x_l = 0.1 → ḡ = −0.5j（向电网输出无功 0.5）
    """
    check_voltage(V)
    Vb = np.conj(V)
    return -1j / params.x_l * (state.e_vir * Vb * np.exp(1j * state.delta) - V * Vb)


def gfm_injection_partials(params: GfmParams, state: GfmState, V: complex) -> Tuple[complex, complex, np.ndarray]:
    """(∂ḡ/∂V, ∂ḡ/∂V̄, ∂ḡ/∂x)"""
    check_voltage(V)
    Vb = np.conj(V)
    rot = np.exp(1j * state.delta)
    dg_dV = 1j * Vb / params.x_l
    dg_dVbar = -1j * state.e_vir * rot / params.x_l + 1j * V / params.x_l
    dg_dx = np.zeros(4, dtype=complex)
    dg_dx[ANGLE] = state.e_vir * Vb * rot / params.x_l
    dg_dx[INTERNAL] = (np.sin(state.delta) - 1j * np.cos(state.delta)) * Vb / params.x_l
    return dg_dV, dg_dVbar, dg_dx


def reactive_output(params: GfmParams, state: GfmState, V: complex) -> float:
    """Q_c = −Im(ḡ) = (E_vir·Re(V̄e^{jδ}) − |V|²)/x_l"""
    return float(-gfm_injection(params, state, V).imag)


def gfm_derivative(
    params: GfmParams,
    state: GfmState,
    V: complex,
    Q_c: float,
    omega_s: float = DEFAULT_OMEGA_S,
) -> np.ndarray:
    """
    构网型变流器状态导数

    Args:
        params: 变流器参数
        state: 变流器状态
        V: 端电压
        Q_c: 实测输出无功（由同一次网络求解的 ḡ 得到）
        omega_s: 同步角速度

    Raises:
        LowVoltageRegime: |V| = 0
    """
    v_mag = check_voltage(V)
    p_e = float(gfm_injection(params, state, V).real)
    out = np.empty(4)
    out[ANGLE] = omega_s * state.omega
    out[SPEED] = (params.P_ref - p_e - params.damping * state.omega) / (2.0 * params.H_vir)
    out[INTERNAL] = (params.K_q * (params.Q_ref - Q_c) + state.e_vir_fd) / params.K_i
    out[EXCITER] = (params.K_u * (params.V_ref - v_mag) - state.e_vir_fd) / params.T_w
    return out


def gfm_derivative_partials(
    params: GfmParams,
    state: GfmState,
    V: complex,
    omega_s: float = DEFAULT_OMEGA_S,
) -> Tuple[np.ndarray, np.ndarray]:
    """(∂F/∂V, ∂F/∂x)；Q_c 的依赖已计入"""
    check_voltage(V)
    dg_dV, dg_dVbar, dg_dx = gfm_injection_partials(params, state, V)
    dPe_dV = 0.5 * (dg_dV + np.conj(dg_dVbar))
    # Q_c = −Im(ḡ) = (conj(ḡ) − ḡ)/(2j)
    dQ_dV = (np.conj(dg_dVbar) - dg_dV) / 2j
    dQ_dx = -dg_dx.imag

    dF_dV = np.zeros(4, dtype=complex)
    dF_dV[SPEED] = -dPe_dV / (2.0 * params.H_vir)
    dF_dV[INTERNAL] = -params.K_q * dQ_dV / params.K_i
    dF_dV[EXCITER] = -params.K_u * magnitude_partial(V) / params.T_w

    dF_dx = np.zeros((4, 4))
    dF_dx[ANGLE, SPEED] = omega_s
    dF_dx[SPEED, ANGLE] = -dg_dx[ANGLE].real / (2.0 * params.H_vir)
    dF_dx[SPEED, SPEED] = -params.damping / (2.0 * params.H_vir)
    dF_dx[SPEED, INTERNAL] = -dg_dx[INTERNAL].real / (2.0 * params.H_vir)
    dF_dx[INTERNAL, ANGLE] = -params.K_q * dQ_dx[ANGLE] / params.K_i
    dF_dx[INTERNAL, INTERNAL] = -params.K_q * dQ_dx[INTERNAL] / params.K_i
    dF_dx[INTERNAL, EXCITER] = 1.0 / params.K_i
    dF_dx[EXCITER, EXCITER] = -1.0 / params.T_w
    return dF_dV, dF_dx


def gfm_quasi_steady(params: GfmParams, V: complex) -> float:
    """电压环准稳态 E_vir_fd = K_u(V_ref − |V|)"""
    return params.K_u * (params.V_ref - check_voltage(V))


def gfm_equilibrium(params: GfmParams, V: complex, S: complex) -> Tuple[GfmState, GfmParams]:
    """
    由端电压与注入功率反推变流器平衡点

        E_vir·e^{jδ} = V + j·x_l·conj(S/V)
        V_ref = |V|，E_vir_fd = 0，Q_ref = Im(S)，P_ref = Re(S)
    """
    v_mag = check_voltage(V)
    internal = V + 1j * params.x_l * np.conj(S / V)
    state = GfmState(delta=float(np.angle(internal)), omega=0.0, e_vir=float(abs(internal)), e_vir_fd=0.0)
    updated = replace(params, V_ref=float(v_mag), Q_ref=float(S.imag), P_ref=float(S.real))
    # Q_ref 取实测值，保证 Ė_vir 严格为零
    updated = replace(updated, Q_ref=reactive_output(updated, state, V))
    return state, updated


@dataclass(frozen=True)
class GridFormingConverter(Device):
    """构网型变流器设备"""

    bus: int
    params: GfmParams
    name: str = ""
    kind: str = field(default="gfm", init=False)
    state_names: Tuple[str, ...] = field(default=("delta", "omega", "evir", "evirfd"), init=False)

    def injection(self, x, V):
        return gfm_injection(self.params, GfmState.from_array(x), V)

    def injection_partials(self, x, V):
        return gfm_injection_partials(self.params, GfmState.from_array(x), V)

    def derivative(self, x, V, omega_s):
        state = GfmState.from_array(x)
        return gfm_derivative(self.params, state, V, reactive_output(self.params, state, V), omega_s)

    def derivative_partials(self, x, V, omega_s):
        return gfm_derivative_partials(self.params, GfmState.from_array(x), V, omega_s)

    def quasi_steady(self, V):
        return gfm_quasi_steady(self.params, V)

    def shunt_term(self):
        return 1j / self.params.x_l

    def time_constants(self):
        return self.params.K_i, self.params.T_w

    def reference_gain(self):
        return self.params.K_u / self.params.K_i

    def initialize(self, V, S):
        state, params = gfm_equilibrium(self.params, V, S)
        return state.to_array(), replace(self, params=params)

    def with_params(self, **changes):
        return replace(self, params=replace(self.params, **changes))

    @property
    def v_ref(self):
        return self.params.V_ref
