# coding=utf-8
"""
三阶线性示例系统

    ẋ = A·x + b·u(t)，y = c·x，x(0) = 0，u 为单位阶跃乘以 input_scale

A 为 Metzler 矩阵且 b、c 非负，因此系统是输入-状态-输出单调的：
输入加倍后状态与输出在每个时刻都不减小。
"""

from typing import Tuple

import numpy as np
import scipy.linalg

from voltmono.monotone.theorem import MonotoneVerdict, check_theorem1
from voltmono.simulation.timeseries import TimeSeries, TimeSeriesBuilder
from voltmono.utils.errors import InvalidParameterError

LINEAR_A = np.array([
    [-1.0, 0.0, 2.0],
    [1.0, -3.0, 0.0],
    [0.0, 1.0, -4.0],
])
LINEAR_B = np.array([4.0, 0.0, 1.0])
LINEAR_C = np.array([0.0, 1.0, 2.0])
STATE_LABELS = ("x1", "x2", "x3")


def linear_demo_system() -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    """(A, b, c) 副本"""
    return LINEAR_A.copy(), LINEAR_B.copy(), LINEAR_C.copy()


def linear_demo_verdict(eps: float = 0.0) -> MonotoneVerdict:
    return check_theorem1(LINEAR_A, LINEAR_B, LINEAR_C, eps=eps)


def steady_state(input_scale: float = 1.0) -> Tuple[np.ndarray, float]:
    """x∞ = −A⁻¹·b·u，y∞ = c·x∞"""
    x_inf = -scipy.linalg.solve(LINEAR_A, LINEAR_B) * input_scale
    return x_inf, float(LINEAR_C @ x_inf)


def run_linear_demo(input_scale: float = 1.0, t_end: float = 40.0, dt: float = 1e-2) -> TimeSeries:
    """
    线性示例的时域响应

    采用零阶保持精确离散化 x_{k+1} = Φ·x_k + Γ·u，Φ = e^{A·dt}，Γ = A⁻¹(Φ − I)·b，
    阶跃输入下没有截断误差。

    Args:
        input_scale: 阶跃幅值（≥ 0）
        t_end: 仿真时长
        dt: 采样间隔

    Returns:
        TimeSeries，状态 x1..x3，附加信号 y

    Raises:
        InvalidParameterError: input_scale < 0 或 dt、t_end 非正
    """
    if input_scale < 0:
        raise InvalidParameterError(f"input_scale 必须非负: {input_scale}")
    if not (dt > 0 and t_end > 0):
        raise InvalidParameterError("dt 与 t_end 必须大于 0")

    Phi = scipy.linalg.expm(LINEAR_A * dt)
    Gamma = scipy.linalg.solve(LINEAR_A, (Phi - np.eye(3)) @ LINEAR_B)

    builder = TimeSeriesBuilder(STATE_LABELS, name=f"linear_x{input_scale:g}")
    x = np.zeros(3)
    n_steps = int(round(t_end / dt))
    builder.append(0.0, x, y=float(LINEAR_C @ x))
    for k in range(n_steps):
        x = Phi @ x + Gamma * input_scale
        builder.append((k + 1) * dt, x, y=float(LINEAR_C @ x))
    return builder.build()
