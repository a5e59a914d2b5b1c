# coding=utf-8
"""
同步发电机模型

单轴（暂态电势 E′q）模型 + 一阶励磁系统 + 二阶摇摆方程。

dq 坐标约定：u = V·e^{−jδ} = V_q − j·V_d
    I_d = (E′q − V_q)/x′d，I_q = V_d/x_q
    I = −j·(I_d + j·I_q)·e^{jδ}，ḡ = V̄·I
展开后：
    ḡ = j·a·|V|² + j·b·V̄²·e^{j2δ} − j·E′q·V̄·e^{jδ}/x′d
    a = (1/x′d + 1/x_q)/2，b = (1/x′d − 1/x_q)/2
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
from voltmono.utils.errors import ValidationError

DEFAULT_OMEGA_S = 2.0 * np.pi * 60.0


@dataclass(frozen=True)
class SgParams:
    """同步机参数（系统基准标幺值）"""

    x_d: float
    x_q: float
    x_d_prime: float
    T_d0_prime: float
    K_A: float
    T_A: float
    H: float = 3.0
    D: float = 0.0
    V_ref: float = 1.0
    P_m: float = 0.0

    def __post_init__(self):
        if not self.x_d_prime > 0:
            raise ValidationError("x_d_prime", "必须大于 0")
        if self.x_d < self.x_d_prime:
            raise ValidationError("x_d", "必须不小于 x_d_prime")
        if not self.x_q > 0:
            raise ValidationError("x_q", "必须大于 0")
        if not self.T_d0_prime > 0:
            raise ValidationError("T_d0_prime", "必须大于 0")
        if not self.T_A > 0:
            raise ValidationError("T_A", "必须大于 0")
        if self.K_A < 0:
            raise ValidationError("K_A", "不能为负")
        if not self.H > 0:
            raise ValidationError("H", "必须大于 0")

    @property
    def saliency(self) -> Tuple[float, float]:
        """(a, b) 系数"""
        a = 0.5 * (1.0 / self.x_d_prime + 1.0 / self.x_q)
        b = 0.5 * (1.0 / self.x_d_prime - 1.0 / self.x_q)
        return a, b


@dataclass(frozen=True)
class SgState:
    """同步机状态"""

    delta: float
    omega: float
    e_q: float
    e_fd: float

    def to_array(self) -> np.ndarray:
        return np.array([self.delta, self.omega, self.e_q, self.e_fd], dtype=float)

    @classmethod
    def from_array(cls, x) -> "SgState":
        return cls(delta=float(x[ANGLE]), omega=float(x[SPEED]), e_q=float(x[INTERNAL]), e_fd=float(x[EXCITER]))


def sg_injection(params: SgParams, state: SgState, V: complex) -> complex:
    """
    同步机共轭注入功率 ḡ = V̄·I

    Args:
        params: 同步机参数
        state: 同步机状态
        V: 端电压（标幺）

    Returns:
        ḡ
    """
    check_voltage(V)
    a, b = params.saliency
    Vb = np.conj(V)
    rot = np.exp(1j * state.delta)
    return (
        1j * a * Vb * V
        + 1j * b * Vb * Vb * rot * rot
        - 1j * state.e_q * Vb * rot / params.x_d_prime
    )


def sg_injection_partials(params: SgParams, state: SgState, V: complex) -> Tuple[complex, complex, np.ndarray]:
    """(∂ḡ/∂V, ∂ḡ/∂V̄, ∂ḡ/∂x)"""
    check_voltage(V)
    a, b = params.saliency
    Vb = np.conj(V)
    rot = np.exp(1j * state.delta)
    dg_dV = 1j * a * Vb
    dg_dVbar = 1j * a * V + 2j * b * Vb * rot * rot - 1j * state.e_q * rot / params.x_d_prime
    dg_dx = np.zeros(4, dtype=complex)
    dg_dx[ANGLE] = state.e_q * Vb * rot / params.x_d_prime - 2.0 * b * Vb * Vb * rot * rot
    dg_dx[INTERNAL] = -1j * Vb * rot / params.x_d_prime
    return dg_dV, dg_dVbar, dg_dx


def _v_q(state: SgState, V: complex) -> float:
    return float((V * np.exp(-1j * state.delta)).real)


def sg_derivative(
    params: SgParams,
    state: SgState,
    V: complex,
    omega_s: float = DEFAULT_OMEGA_S,
) -> np.ndarray:
    """
    同步机状态导数

        δ̇ = ω_s·ω
        2H·ω̇ = P_m − P_e − D·ω
        T′d0·Ė′q = E_fd − (x_d/x′d)·E′q + (x_d/x′d − 1)·V_q
        T_A·Ė_fd = K_A(V_ref − |V|) − E_fd

    Raises:
        LowVoltageRegime: |V| = 0
    """
    v_mag = check_voltage(V)
    k = params.x_d / params.x_d_prime
    p_e = float(sg_injection(params, state, V).real)
    out = np.empty(4)
    out[ANGLE] = omega_s * state.omega
    out[SPEED] = (params.P_m - p_e - params.D * state.omega) / (2.0 * params.H)
    out[INTERNAL] = (state.e_fd - k * state.e_q + (k - 1.0) * _v_q(state, V)) / params.T_d0_prime
    out[EXCITER] = (params.K_A * (params.V_ref - v_mag) - state.e_fd) / params.T_A
    return out


def sg_derivative_partials(
    params: SgParams,
    state: SgState,
    V: complex,
    omega_s: float = DEFAULT_OMEGA_S,
) -> Tuple[np.ndarray, np.ndarray]:
    """(∂F/∂V, ∂F/∂x)；∂F/∂V̄ = conj(∂F/∂V)"""
    check_voltage(V)
    k = params.x_d / params.x_d_prime
    rot_inv = np.exp(-1j * state.delta)
    dg_dV, dg_dVbar, dg_dx = sg_injection_partials(params, state, V)
    # P_e = (ḡ + conj(ḡ))/2
    dPe_dV = 0.5 * (dg_dV + np.conj(dg_dVbar))
    dPe_dx = dg_dx.real

    dF_dV = np.zeros(4, dtype=complex)
    dF_dV[SPEED] = -dPe_dV / (2.0 * params.H)
    dF_dV[INTERNAL] = (k - 1.0) * 0.5 * rot_inv / params.T_d0_prime
    dF_dV[EXCITER] = -params.K_A * magnitude_partial(V) / params.T_A

    dF_dx = np.zeros((4, 4))
    dF_dx[ANGLE, SPEED] = omega_s
    dF_dx[SPEED, ANGLE] = -dPe_dx[ANGLE] / (2.0 * params.H)
    dF_dx[SPEED, SPEED] = -params.D / (2.0 * params.H)
    dF_dx[SPEED, INTERNAL] = -dPe_dx[INTERNAL] / (2.0 * params.H)
    dF_dx[INTERNAL, ANGLE] = (k - 1.0) * float((V * rot_inv).imag) / params.T_d0_prime
    dF_dx[INTERNAL, INTERNAL] = -k / params.T_d0_prime
    dF_dx[INTERNAL, EXCITER] = 1.0 / params.T_d0_prime
    dF_dx[EXCITER, EXCITER] = -1.0 / params.T_A
    return dF_dV, dF_dx


def sg_quasi_steady(params: SgParams, V: complex) -> float:
    """励磁准稳态 E_fd = K_A(V_ref − |V|)"""
    return params.K_A * (params.V_ref - check_voltage(V))


def sg_equilibrium(params: SgParams, V: complex, S: complex) -> Tuple[SgState, SgParams]:
    """
    由端电压与注入功率反推同步机平衡点

        I = conj(S/V)，E_Q = V + j·x_q·I，δ = ∠E_Q
        I_d + j·I_q = j·I·e^{−jδ}
        E′q = V_q + x′d·I_d，E_fd = E′q + (x_d − x′d)·I_d
        V_ref = |V| + E_fd/K_A，P_m = Re(S)
    """
    v_mag = check_voltage(V)
    current = np.conj(S / V)
    delta = float(np.angle(V + 1j * params.x_q * current))
    idq = 1j * current * np.exp(-1j * delta)
    v_q = float((V * np.exp(-1j * delta)).real)
    e_q = v_q + params.x_d_prime * float(idq.real)
    e_fd = e_q + (params.x_d - params.x_d_prime) * float(idq.real)
    v_ref = v_mag + e_fd / params.K_A if params.K_A > 0 else v_mag
    updated = replace(params, V_ref=float(v_ref), P_m=float(S.real))
    return SgState(delta=delta, omega=0.0, e_q=e_q, e_fd=e_fd), updated


@dataclass(frozen=True)
class SynchronousGenerator(Device):
    """同步发电机设备"""

    bus: int
    params: SgParams
    name: str = ""
    kind: str = field(default="sg", init=False)
    state_names: Tuple[str, ...] = field(default=("delta", "omega", "eq", "efd"), init=False)

    def injection(self, x, V):
        return sg_injection(self.params, SgState.from_array(x), V)

    def injection_partials(self, x, V):
        return sg_injection_partials(self.params, SgState.from_array(x), V)

    def derivative(self, x, V, omega_s):
        return sg_derivative(self.params, SgState.from_array(x), V, omega_s)

    def derivative_partials(self, x, V, omega_s):
        return sg_derivative_partials(self.params, SgState.from_array(x), V, omega_s)

    def quasi_steady(self, V):
        return sg_quasi_steady(self.params, V)

    def shunt_term(self):
        return 1j * self.params.saliency[0]

    def time_constants(self):
        return self.params.T_d0_prime, self.params.T_A

    def reference_gain(self):
        return self.params.K_A / self.params.T_d0_prime

    def initialize(self, V, S):
        state, params = sg_equilibrium(self.params, V, S)
        return state.to_array(), replace(self, params=params)

    def with_params(self, **changes):
        return replace(self, params=replace(self.params, **changes))

    @property
    def v_ref(self):
        return self.params.V_ref
