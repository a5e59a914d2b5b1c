# coding=utf-8
"""
网络模块 - 节点导纳矩阵、网络代数方程与潮流
"""

from voltmono.network.admittance import (
    Bus,
    BusKind,
    Branch,
    NetworkModel,
    ImpedanceReport,
    build_admittance,
    augmented_admittance,
    impedance_matrix,
)
from voltmono.network.solver import (
    ComplexVoltageProfile,
    DEFAULT_V_FLOOR,
    current_newton_matrices,
    network_residual,
    newton_matrices,
    stacked_real_jacobian,
    solve_network,
)
from voltmono.network.powerflow import PowerFlowResult, run_power_flow

__all__ = [
    "Bus",
    "BusKind",
    "Branch",
    "NetworkModel",
    "ImpedanceReport",
    "build_admittance",
    "augmented_admittance",
    "impedance_matrix",
    "ComplexVoltageProfile",
    "DEFAULT_V_FLOOR",
    "current_newton_matrices",
    "network_residual",
    "newton_matrices",
    "stacked_real_jacobian",
    "solve_network",
    "PowerFlowResult",
    "run_power_flow",
]
