# coding=utf-8
"""
轨迹序关系检查模块

- ordering_check: 两条轨迹在选定信号上的逐点序关系
- variation_positivity: 沿轨迹积分变分方程 Δẋ = (∂f/∂x)Δx + (∂f/∂v)Δv，检查正性
"""

from dataclasses import dataclass
from typing import Any, Dict, Optional, Sequence, Tuple

import numpy as np

from voltmono.utils.errors import GridMismatchError, InvalidParameterError


@dataclass(frozen=True)
class OrderingReport:
    """序关系检查结果"""

    holds: bool
    worst_violation: float
    first_violation_time: Optional[float] = None
    worst_signal: Optional[str] = None
    samples: int = 0

    def to_dict(self) -> Dict[str, Any]:
        return {
            "holds": self.holds,
            "worst_violation": self.worst_violation,
            "first_violation_time": self.first_violation_time,
            "worst_signal": self.worst_signal,
            "samples": self.samples,
        }


def ordering_check(
    run_hi,
    run_lo,
    signals: Sequence[str],
    tol: float = 1e-6,
    window: Optional[Tuple[float, float]] = None,
) -> OrderingReport:
    """
    检查 run_hi 的选定信号在每个采样点都不低于 run_lo − tol

    Args:
        run_hi: 输入较大的一组轨迹（需提供 times 与 signal(name)）
        run_lo: 输入较小的一组轨迹
        signals: 信号名列表
        tol: 容差
        window: 仅在 [t0, t1] 内检查（可选）

    Returns:
        OrderingReport

    Raises:
        GridMismatchError: 时间网格不一致
    """
    t_hi = np.asarray(run_hi.times)
    t_lo = np.asarray(run_lo.times)
    if t_hi.shape != t_lo.shape or not np.array_equal(t_hi, t_lo):
        raise GridMismatchError(f"时间网格不一致: {t_hi.shape} vs {t_lo.shape}")

    mask = np.ones(t_hi.shape, dtype=bool)
    if window is not None:
        mask = (t_hi >= window[0]) & (t_hi <= window[1])

    worst = 0.0
    worst_signal = None
    first_time = None
    for name in signals:
        gap = np.asarray(run_lo.signal(name), dtype=float) - np.asarray(run_hi.signal(name), dtype=float)
        gap = gap[mask]
        if gap.size == 0:
            continue
        peak = float(np.max(gap))
        if peak > worst:
            worst = peak
            worst_signal = name
        bad = np.nonzero(gap > tol)[0]
        if bad.size:
            t_bad = float(t_hi[mask][bad[0]])
            first_time = t_bad if first_time is None else min(first_time, t_bad)

    return OrderingReport(
        holds=first_time is None,
        worst_violation=worst,
        first_violation_time=first_time,
        worst_signal=worst_signal,
        samples=int(np.count_nonzero(mask)),
    )


@dataclass(frozen=True, eq=False)
class VariationReport:
    """变分方程正性检查结果"""

    positive: bool
    min_component: float
    times: np.ndarray
    trajectory: np.ndarray          # len(times) × m

    def to_dict(self) -> Dict[str, Any]:
        return {"positive": self.positive, "min_component": self.min_component, "samples": int(len(self.times))}


def variation_positivity(
    trajectory,
    dfdx_snapshots: Sequence[np.ndarray],
    dfdv_snapshots: Sequence[np.ndarray],
    dv,
    dx0=None,
    tol: float = 1e-8,
    substeps: int = 1,
) -> VariationReport:
    """
    沿轨迹积分变分方程并检查 Δx(t) ≥ −tol

    快照之间的系数矩阵按线性插值，采用经典 RK4。

    Args:
        trajectory: 快照时刻序列，或带 jacobian_times / times 属性的时间序列对象
        dfdx_snapshots: 各快照的 ∂f/∂x
        dfdv_snapshots: 各快照的 ∂f/∂v（一维时视为单列）
        dv: 输入变分 Δv ≥ 0
        dx0: 初始变分（默认 0）
        tol: 负值容差
        substeps: 每个快照区间的子步数

    Raises:
        InvalidParameterError: Δv 含负元或快照数与时刻数不一致
    """
    if hasattr(trajectory, "jacobian_times"):
        times = np.asarray(trajectory.jacobian_times, dtype=float)
    elif hasattr(trajectory, "times"):
        times = np.asarray(trajectory.times, dtype=float)
    else:
        times = np.asarray(trajectory, dtype=float)

    dv = np.atleast_1d(np.asarray(dv, dtype=float))
    if np.any(dv < 0):
        raise InvalidParameterError("Δv 必须非负")
    if len(dfdx_snapshots) != len(times) or len(dfdv_snapshots) != len(times):
        raise InvalidParameterError(
            f"快照数 ({len(dfdx_snapshots)}, {len(dfdv_snapshots)}) 与时刻数 {len(times)} 不一致"
        )

    A = [np.asarray(a, dtype=float) for a in dfdx_snapshots]
    Bv = []
    for b in dfdv_snapshots:
        b = np.asarray(b, dtype=float)
        if b.ndim == 1:
            b = b[:, None]
        Bv.append(b @ dv)

    m = A[0].shape[0]
    x = np.zeros(m) if dx0 is None else np.array(dx0, dtype=float)
    out = [x.copy()]

    def field(k: int, s: float, y: np.ndarray) -> np.ndarray:
        Ak = (1.0 - s) * A[k] + s * A[k + 1]
        bk = (1.0 - s) * Bv[k] + s * Bv[k + 1]
        return Ak @ y + bk

    for k in range(len(times) - 1):
        h = (times[k + 1] - times[k]) / substeps
        for j in range(substeps):
            s0 = j / substeps
            ds = 1.0 / substeps
            k1 = field(k, s0, x)
            k2 = field(k, s0 + ds / 2, x + h / 2 * k1)
            k3 = field(k, s0 + ds / 2, x + h / 2 * k2)
            k4 = field(k, s0 + ds, x + h * k3)
            x = x + h / 6.0 * (k1 + 2 * k2 + 2 * k3 + k4)
        out.append(x.copy())

    traj = np.array(out)
    min_component = float(np.min(traj)) if traj.size else 0.0
    return VariationReport(
        positive=bool(min_component >= -tol),
        min_component=min_component,
        times=times,
        trajectory=traj,
    )
