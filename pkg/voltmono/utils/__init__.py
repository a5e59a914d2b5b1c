# coding=utf-8
"""
工具模块 - 错误类型等公共工具
"""

from voltmono.utils.errors import (
    VoltMonoError,
    InvalidParameterError,
    ConfigurationError,
    TopologyError,
    NonConvergence,
    SingularMatrixError,
    SingularNetworkJacobian,
    SingularSchurComplement,
    LowVoltageRegime,
    StaleVoltageProfile,
    PowerFlowDiverged,
    EquilibriumResidualTooLarge,
    ParseError,
    ValidationError,
    UnknownTargetError,
    GridMismatchError,
    SimulationError,
)

__all__ = [
    "VoltMonoError",
    "InvalidParameterError",
    "ConfigurationError",
    "TopologyError",
    "NonConvergence",
    "SingularMatrixError",
    "SingularNetworkJacobian",
    "SingularSchurComplement",
    "LowVoltageRegime",
    "StaleVoltageProfile",
    "PowerFlowDiverged",
    "EquilibriumResidualTooLarge",
    "ParseError",
    "ValidationError",
    "UnknownTargetError",
    "GridMismatchError",
    "SimulationError",
]
