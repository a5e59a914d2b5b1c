# coding=utf-8
"""
设备模型基类

定义动态设备的统一接口：注入函数 ḡ、状态方程 F 及其解析偏导。
每个设备占 4 个状态，顺序固定为 [角度, 转速, 内电势, 励磁/电压环状态]。
"""

from abc import ABC, abstractmethod
from dataclasses import dataclass
from typing import Any, Dict, Tuple

import numpy as np

from voltmono.utils.errors import LowVoltageRegime

ANGLE, SPEED, INTERNAL, EXCITER = 0, 1, 2, 3
N_STATES = 4
MIN_VOLTAGE = 1e-12


@dataclass(frozen=True, eq=False)
class DevicePartials:
    """
    单台设备的全部解析偏导

    F 为状态导数（已除以时间常数），ḡ 为本母线共轭注入功率。
    由于 F 为实函数，dF_dVbar 恒等于 conj(dF_dV)。
    """

    dF_dV: np.ndarray               # (4,) 复
    dF_dVbar: np.ndarray            # (4,) 复
    dF_dx: np.ndarray               # (4, 4) 实
    dg_dV: complex
    dg_dVbar: complex
    dg_dx: np.ndarray               # (4,) 复

    def to_dict(self) -> Dict[str, Any]:
        return {
            "dF_dV": [complex(v) for v in self.dF_dV],
            "dF_dx": self.dF_dx.tolist(),
            "dg_dV": complex(self.dg_dV),
            "dg_dVbar": complex(self.dg_dVbar),
            "dg_dx": [complex(v) for v in self.dg_dx],
        }


def check_voltage(V: complex, bus: int = -1) -> float:
    """返回 |V|，电压为零时抛出 LowVoltageRegime"""
    magnitude = abs(V)
    if magnitude < MIN_VOLTAGE:
        raise LowVoltageRegime(bus, magnitude)
    return magnitude


def magnitude_partial(V: complex) -> complex:
    """∂|V|/∂V = V̄/(2|V|)"""
    return np.conj(V) / (2.0 * abs(V))


class Device(ABC):
    """动态设备抽象基类"""

    bus: int
    name: str
    kind: str = ""
    state_names: Tuple[str, ...] = ()

    @abstractmethod
    def injection(self, x: np.ndarray, V: complex) -> complex:
        """共轭注入功率 ḡ = V̄·I"""

    @abstractmethod
    def injection_partials(self, x: np.ndarray, V: complex) -> Tuple[complex, complex, np.ndarray]:
        """(∂ḡ/∂V, ∂ḡ/∂V̄, ∂ḡ/∂x)"""

    @abstractmethod
    def derivative(self, x: np.ndarray, V: complex, omega_s: float) -> np.ndarray:
        """状态导数 F(x, V)"""

    @abstractmethod
    def derivative_partials(self, x: np.ndarray, V: complex, omega_s: float) -> Tuple[np.ndarray, np.ndarray]:
        """(∂F/∂V, ∂F/∂x)"""

    @abstractmethod
    def quasi_steady(self, V: complex) -> float:
        """快速励磁/电压环状态的准稳态值"""

    @abstractmethod
    def shunt_term(self) -> complex:
        """∂ḡ/∂V 中与 V̄ 成比例的系数，用于构造 Y_aug"""

    @abstractmethod
    def time_constants(self) -> Tuple[float, float]:
        """(内电势时间常数 T_E, 快速状态时间常数 T_Efd)"""

    @abstractmethod
    def reference_gain(self) -> float:
        """降阶模型中 ∂ℰ̇/∂V_ref"""

    @abstractmethod
    def initialize(self, V: complex, S: complex) -> Tuple[np.ndarray, "Device"]:
        """由端电压与注入功率反推平衡状态，返回 (状态, 设定值更新后的设备)"""

    @abstractmethod
    def with_params(self, **changes) -> "Device":
        """返回参数替换后的新设备"""

    @property
    @abstractmethod
    def v_ref(self) -> float:
        """电压参考值"""

    def partials(self, x: np.ndarray, V: complex, omega_s: float) -> DevicePartials:
        """全部解析偏导"""
        dg_dV, dg_dVbar, dg_dx = self.injection_partials(x, V)
        dF_dV, dF_dx = self.derivative_partials(x, V, omega_s)
        return DevicePartials(
            dF_dV=dF_dV,
            dF_dVbar=np.conj(dF_dV),
            dF_dx=dF_dx,
            dg_dV=dg_dV,
            dg_dVbar=dg_dVbar,
            dg_dx=dg_dx,
        )
