# coding=utf-8
"""
设备模块 - 同步发电机、构网型变流器与负荷

提供各设备的注入函数、状态方程与解析偏导。
"""

from typing import Union

from voltmono.devices.base import (
    ANGLE,
    SPEED,
    INTERNAL,
    EXCITER,
    N_STATES,
    Device,
    DevicePartials,
)
from voltmono.devices.sg import (
    DEFAULT_OMEGA_S,
    SgParams,
    SgState,
    SynchronousGenerator,
    sg_derivative,
    sg_derivative_partials,
    sg_equilibrium,
    sg_injection,
    sg_injection_partials,
)
from voltmono.devices.gfm import (
    GfmParams,
    GfmState,
    GridFormingConverter,
    gfm_derivative,
    gfm_derivative_partials,
    gfm_equilibrium,
    gfm_injection,
    gfm_injection_partials,
    reactive_output,
)
from voltmono.devices.load import DEFAULT_BREAK_VOLTAGE, consumed_power, load_injection

from voltmono.devices.sg import sg_quasi_steady as _sg_quasi_steady
from voltmono.devices.gfm import gfm_quasi_steady as _gfm_quasi_steady


def device_partials(
    params: Union[SgParams, GfmParams],
    state: Union[SgState, GfmState],
    V: complex,
    omega_s: float = DEFAULT_OMEGA_S,
) -> DevicePartials:
    """
    按参数类型分派的解析偏导

    Raises:
        LowVoltageRegime: |V| = 0
    """
    if isinstance(params, SgParams):
        device = SynchronousGenerator(bus=0, params=params)
    else:
        device = GridFormingConverter(bus=0, params=params)
    return device.partials(state.to_array(), V, omega_s)


def quasi_steady_exciter(params: Union[SgParams, GfmParams], V: complex) -> float:
    """
    快速状态的准稳态值

    同步机 E_fd = K_A(V_ref − |V|)，变流器 E_vir_fd = K_u(V_ref − |V|)
    """
    if isinstance(params, SgParams):
        return _sg_quasi_steady(params, V)
    return _gfm_quasi_steady(params, V)


__all__ = [
    "ANGLE",
    "SPEED",
    "INTERNAL",
    "EXCITER",
    "N_STATES",
    "Device",
    "DevicePartials",
    "DEFAULT_OMEGA_S",
    "SgParams",
    "SgState",
    "SynchronousGenerator",
    "sg_derivative",
    "sg_derivative_partials",
    "sg_equilibrium",
    "sg_injection",
    "sg_injection_partials",
    "GfmParams",
    "GfmState",
    "GridFormingConverter",
    "gfm_derivative",
    "gfm_derivative_partials",
    "gfm_equilibrium",
    "gfm_injection",
    "gfm_injection_partials",
    "reactive_output",
    "DEFAULT_BREAK_VOLTAGE",
    "consumed_power",
    "load_injection",
    "device_partials",
    "quasi_steady_exciter",
]
