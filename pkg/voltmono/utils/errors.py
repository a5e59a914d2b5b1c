# coding=utf-8
"""
自定义错误类

定义 voltmono 使用的所有自定义异常类型，统一携带错误码与处理建议，
便于命令行以单行 JSON 形式输出。
"""

from typing import Any, Optional


class VoltMonoError(Exception):
    """voltmono 错误基类"""

    def __init__(self, message: str, code: str = "VOLTMONO_ERROR", suggestion: Optional[str] = None):
        super().__init__(message)
        self.code = code
        self.message = message
        self.suggestion = suggestion

    def to_dict(self) -> dict:
        """转换为字典格式"""
        error_dict = {
            "code": self.code,
            "message": self.message
        }
        if self.suggestion:
            error_dict["suggestion"] = self.suggestion
        return error_dict


class InvalidParameterError(VoltMonoError):
    """参数无效错误"""

    def __init__(self, message: str, suggestion: Optional[str] = None):
        super().__init__(
            message=message,
            code="INVALID_PARAMETER",
            suggestion=suggestion or "请检查参数格式是否正确"
        )


class ConfigurationError(VoltMonoError):
    """配置错误"""

    def __init__(self, message: str, suggestion: Optional[str] = None):
        super().__init__(
            message=message,
            code="CONFIGURATION_ERROR",
            suggestion=suggestion or "请检查配置文件是否正确"
        )


class TopologyError(VoltMonoError):
    """网络拓扑错误（重复平衡节点、网络不连通、支路端点非法等）"""

    def __init__(self, message: str, suggestion: Optional[str] = None):
        super().__init__(
            message=message,
            code="TOPOLOGY_ERROR",
            suggestion=suggestion or "请检查算例的节点与支路数据"
        )


class NonConvergence(VoltMonoError):
    """网络方程牛顿迭代不收敛"""

    def __init__(self, iterations: int, residual: float, detail: str = ""):
        message = f"网络方程在 {iterations} 次迭代后未收敛，残差 {residual:.3e}"
        if detail:
            message = f"{message}: {detail}"
        super().__init__(
            message=message,
            code="NON_CONVERGENCE",
            suggestion="请检查运行点是否接近电压崩溃，或改善初值"
        )
        self.iterations = iterations
        self.residual = residual


class SingularMatrixError(VoltMonoError):
    """矩阵奇异错误基类"""

    def __init__(self, message: str, code: str = "SINGULAR_MATRIX", suggestion: Optional[str] = None):
        super().__init__(
            message=message,
            code=code,
            suggestion=suggestion or "矩阵接近奇异，请检查网络参数"
        )


class SingularNetworkJacobian(SingularMatrixError):
    """网络方程雅可比矩阵奇异"""

    def __init__(self, message: str = "网络方程雅可比矩阵奇异"):
        super().__init__(message, code="SINGULAR_NETWORK_JACOBIAN")


class SingularSchurComplement(SingularMatrixError):
    """A − B·Ā⁻¹·B̄ 奇异（通常出现在电压崩溃附近）"""

    def __init__(self, message: str = "Schur 补矩阵 A − B·Ā⁻¹·B̄ 奇异"):
        super().__init__(
            message,
            code="SINGULAR_SCHUR_COMPLEMENT",
            suggestion="运行点可能接近电压崩溃，灵敏度不可用"
        )


class LowVoltageRegime(VoltMonoError):
    """母线电压幅值为零，励磁反馈无定义"""

    def __init__(self, bus: int, magnitude: float):
        super().__init__(
            message=f"母线 {bus} 电压幅值过低 ({magnitude:.3e})",
            code="LOW_VOLTAGE",
            suggestion="设备模型在零电压下无定义"
        )
        self.bus = bus
        self.magnitude = magnitude


class StaleVoltageProfile(VoltMonoError):
    """电压向量与当前状态不匹配"""

    def __init__(self, residual: float):
        super().__init__(
            message=f"电压向量不满足网络方程，残差 {residual:.3e}",
            code="STALE_VOLTAGE",
            suggestion="请先调用 solve_network 重新求解网络"
        )
        self.residual = residual


class PowerFlowDiverged(VoltMonoError):
    """潮流计算发散"""

    def __init__(self, iterations: int, mismatch: float):
        super().__init__(
            message=f"潮流计算 {iterations} 次迭代后发散，最大功率不平衡 {mismatch:.3e}",
            code="POWER_FLOW_DIVERGED",
            suggestion="请检查负荷水平与发电计划"
        )
        self.iterations = iterations
        self.mismatch = mismatch


class EquilibriumResidualTooLarge(VoltMonoError):
    """平衡点初始化后状态导数过大"""

    def __init__(self, residual: float, detail: str = ""):
        message = f"平衡点状态导数范数 {residual:.3e} 超出容差"
        if detail:
            message = f"{message}: {detail}"
        super().__init__(
            message=message,
            code="EQUILIBRIUM_RESIDUAL",
            suggestion="请检查设备参数与潮流结果是否一致"
        )
        self.residual = residual


class ParseError(VoltMonoError):
    """算例文件语法错误"""

    def __init__(self, line: int, message: str):
        super().__init__(
            message=f"第 {line} 行: {message}",
            code="PARSE_ERROR",
            suggestion="请检查算例文件格式"
        )
        self.line = line


class ValidationError(VoltMonoError):
    """算例数据校验错误"""

    def __init__(self, field: str, reason: str):
        super().__init__(
            message=f"字段 {field}: {reason}",
            code="VALIDATION_ERROR",
            suggestion="请补全或修正该字段"
        )
        self.field = field
        self.reason = reason


class UnknownTargetError(VoltMonoError):
    """事件引用了不存在的母线或设备"""

    def __init__(self, target: Any):
        super().__init__(
            message=f"未知的事件目标: {target}",
            code="UNKNOWN_TARGET",
            suggestion="请检查事件中的母线/设备编号"
        )
        self.target = target


class GridMismatchError(VoltMonoError):
    """两条轨迹的时间网格不一致"""

    def __init__(self, message: str = "两条轨迹的时间网格不一致"):
        super().__init__(
            message=message,
            code="GRID_MISMATCH",
            suggestion="请使用相同的 dt、t_end 与事件时刻"
        )


class SimulationError(VoltMonoError):
    """仿真中途失败，携带已完成部分的时间序列"""

    def __init__(self, cause: VoltMonoError, partial: Any = None):
        super().__init__(
            message=f"仿真中断: {cause.message}",
            code="SIMULATION_FAILED",
            suggestion=cause.suggestion
        )
        self.cause = cause
        self.partial = partial
