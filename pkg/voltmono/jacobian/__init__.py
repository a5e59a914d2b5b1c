# coding=utf-8
"""
雅可比模块 - A/B/C 组装、电压灵敏度、全阶与降阶轨迹雅可比
"""

from voltmono.jacobian.engine import (
    SensitivityMethod,
    SensitivityBundle,
    ReducedJacobian,
    JacobianReport,
    assemble_abc,
    system_bundle,
    voltage_sensitivity_exact,
    voltage_sensitivity_approx,
    approximation_error,
    solve_sensitivity,
    voltage_magnitude_sensitivity,
    compose_full,
    compose_reduced,
    trajectory_jacobian,
    trajectory_jacobian_stacked,
    reduced_jacobian,
    reduced_input_matrix,
    output_matrix,
)

__all__ = [
    "SensitivityMethod",
    "SensitivityBundle",
    "ReducedJacobian",
    "JacobianReport",
    "assemble_abc",
    "system_bundle",
    "voltage_sensitivity_exact",
    "voltage_sensitivity_approx",
    "approximation_error",
    "solve_sensitivity",
    "voltage_magnitude_sensitivity",
    "compose_full",
    "compose_reduced",
    "trajectory_jacobian",
    "trajectory_jacobian_stacked",
    "reduced_jacobian",
    "reduced_input_matrix",
    "output_matrix",
]
