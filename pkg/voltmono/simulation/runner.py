# coding=utf-8
"""
时域仿真运行器

分区显式格式：设备微分方程用定步长经典 RK4 积分，每个 RK4 子步都以上一子步电压为初值
重解网络代数方程。主时间网格为 k·dt（k 为整数），所以同一算例的不同场景网格逐位相同；
落在步内的事件把该步拆成两段，事件前后的电压单独记录在 event_samples 中。
"""

from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Sequence, Tuple

import numpy as np

from voltmono.cases.parser import CaseFile
from voltmono.core.system import PowerSystem
from voltmono.jacobian.engine import output_matrix, reduced_input_matrix, reduced_jacobian, trajectory_jacobian
from voltmono.monotone.gershgorin import GershgorinCertificate, gershgorin_certificate
from voltmono.monotone.ordering import OrderingReport, ordering_check
from voltmono.monotone.theorem import MonotoneVerdict, RegimeReport, check_theorem1, classify_regime
from voltmono.simulation.events import Event, EventKind, EventSample, Scenario, apply_event
from voltmono.simulation.initializer import Equilibrium, init_equilibrium
from voltmono.simulation.timeseries import TimeSeries, TimeSeriesBuilder
from voltmono.utils.errors import NonConvergence, SimulationError, SingularMatrixError, VoltMonoError

# 事件时刻与网格点的重合判定（相对 dt）
_EVENT_TOL = 1e-9


def _rk4_step(system: PowerSystem, x: np.ndarray, V: np.ndarray, h: float, reduced: bool) -> Tuple[np.ndarray, np.ndarray]:
    f = system.rhs_reduced if reduced else system.rhs
    V1 = system.solve(x, V).V
    k1 = f(x, V1)
    x2 = x + 0.5 * h * k1
    V2 = system.solve(x2, V1).V
    k2 = f(x2, V2)
    x3 = x + 0.5 * h * k2
    V3 = system.solve(x3, V2).V
    k3 = f(x3, V3)
    x4 = x + h * k3
    V4 = system.solve(x4, V3).V
    k4 = f(x4, V4)
    x_new = x + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
    if not np.all(np.isfinite(x_new)):
        raise NonConvergence(0, float("inf"))
    V_new = system.solve(x_new, V4).V
    if reduced:
        x_new = system.project_exciters(x_new, V_new)
    return x_new, V_new


def _record(builder: TimeSeriesBuilder, system: PowerSystem, t: float, x: np.ndarray, V: np.ndarray) -> None:
    builder.append(t, x, V, p_e=system.electrical_power(x, V), q_c=system.reactive_power(x, V))


def _resolve_after_event(system: PowerSystem, x: np.ndarray, guesses: Sequence[Optional[np.ndarray]]) -> np.ndarray:
    """拓扑跳变后按顺序尝试各初值，全部失败时抛出最后一个错误"""
    error: Optional[VoltMonoError] = None
    for guess in guesses:
        if guess is None or np.any(guess == 0):
            continue
        try:
            return system.solve(x, guess).V
        except (NonConvergence, SingularMatrixError) as e:
            error = e
    raise error if error is not None else NonConvergence(0, float("inf"))


def _apply(
    builder: TimeSeriesBuilder,
    system: PowerSystem,
    event: Event,
    x: np.ndarray,
    V: np.ndarray,
    fault_admittance: complex,
    quiet: bool,
    pre_fault: Optional[np.ndarray] = None,
) -> Tuple[PowerSystem, np.ndarray, Optional[np.ndarray]]:
    """
    应用事件并重解网络；状态 x 连续，电压可跳变

    初值依次为事件前电压、故障前电压、按故障前相角的平启动、全 1 平启动。
    """
    if event.kind is EventKind.FAULT_ON:
        pre_fault = np.array(V)
    pre = tuple(float(v) for v in np.abs(V))
    system = apply_event(system, event, fault_admittance)
    reference = V if pre_fault is None else pre_fault
    guesses = [V, pre_fault, np.exp(1j * np.angle(reference)), np.ones(system.n, dtype=complex)]
    V = _resolve_after_event(system, x, guesses)
    builder.event_samples.append(EventSample(
        time=event.time,
        kind=event.kind.value,
        bus=event.bus,
        pre_vmag=pre,
        post_vmag=tuple(float(v) for v in np.abs(V)),
    ))
    if not quiet:
        label = system.network.buses[event.bus].label
        print(f"[仿真] t={event.time:.4f}s 事件 {event.kind.value} @ 母线 {label}")
    return system, V, pre_fault


def run(
    scenario: Scenario,
    equilibrium: Equilibrium,
    reduced: bool = False,
    quiet: bool = True,
    raise_on_failure: bool = False,
) -> TimeSeries:
    """
    运行一个场景

    Args:
        scenario: 场景
        equilibrium: 初始平衡点（场景之间可以共享）
        reduced: True 时积分降阶模型（ℰ_fd 由准稳态流形代替）
        quiet: 是否静默
        raise_on_failure: 失败时抛出 SimulationError，否则返回带错误标记的部分序列

    Returns:
        TimeSeries；失败时 status="failed"，error 为错误字典

    Raises:
        SimulationError: raise_on_failure=True 且中途失败
    """
    system = equilibrium.system
    x = np.array(equilibrium.x, dtype=float)
    V = np.array(equilibrium.V, dtype=complex)
    if reduced:
        x = system.project_exciters(x, V)

    builder = TimeSeriesBuilder(
        state_labels=system.layout.labels,
        bus_labels=[b.label for b in system.network.buses],
        device_labels=[system.network.buses[d.bus].label for d in system.devices],
        name=scenario.name + ("_reduced" if reduced else ""),
    )
    dt = scenario.dt
    n_steps = scenario.n_steps
    stride = scenario.jacobian_stride
    pending: List[Event] = list(scenario.events)
    eps = _EVENT_TOL * dt
    report_every = max(n_steps // 10, 1)
    pre_fault: Optional[np.ndarray] = None

    if not quiet:
        mode = "降阶" if reduced else "全阶"
        print(f"[仿真] 场景 {scenario.name}（{mode}）：{n_steps} 步, dt={dt}s, {len(pending)} 个事件")

    try:
        while pending and pending[0].time <= eps:
            system, V, pre_fault = _apply(builder, system, pending.pop(0), x, V, scenario.fault_admittance, quiet, pre_fault)
        _record(builder, system, 0.0, x, V)
        if stride:
            builder.add_jacobian(0.0, trajectory_jacobian(system, x, V, t=0.0))

        for k in range(n_steps):
            t0 = k * dt
            t1 = (k + 1) * dt
            tc = t0
            while pending and pending[0].time < t1 - eps:
                event = pending.pop(0)
                x, V = _rk4_step(system, x, V, event.time - tc, reduced)
                tc = event.time
                system, V, pre_fault = _apply(builder, system, event, x, V, scenario.fault_admittance, quiet, pre_fault)
            x, V = _rk4_step(system, x, V, t1 - tc, reduced)
            while pending and pending[0].time <= t1 + eps:
                system, V, pre_fault = _apply(builder, system, pending.pop(0), x, V, scenario.fault_admittance, quiet, pre_fault)
            _record(builder, system, t1, x, V)
            if stride and (k + 1) % stride == 0:
                builder.add_jacobian(t1, trajectory_jacobian(system, x, V, t=t1))
            if not quiet and (k + 1) % report_every == 0:
                print(f"[仿真] {scenario.name}: t={t1:.3f}s ({100 * (k + 1) // n_steps}%)")
    except VoltMonoError as e:
        partial = builder.build(status="failed", error=e.to_dict())
        if not quiet:
            print(f"[仿真] 场景 {scenario.name} 在 t≈{builder.last_time:.4f}s 失败: {e.message}")
        if raise_on_failure:
            raise SimulationError(e, partial)
        return partial

    return builder.build()


def run_reduced(scenario: Scenario, equilibrium: Equilibrium, **kwargs) -> TimeSeries:
    """降阶模型仿真（见 run）"""
    return run(scenario, equilibrium, reduced=True, **kwargs)


# =============================================================================
# 场景比较
# =============================================================================


@dataclass(frozen=True)
class ScenarioComparison:
    """两个场景在选定信号上的序关系"""

    base: str
    variant: str
    signals: Tuple[str, ...]
    report: OrderingReport
    window: Optional[Tuple[float, float]] = None

    def to_dict(self) -> Dict[str, Any]:
        return {
            "base": self.base,
            "variant": self.variant,
            "signals": list(self.signals),
            "window": list(self.window) if self.window else None,
            **self.report.to_dict(),
        }


def compare_scenarios(
    base: TimeSeries,
    variant: TimeSeries,
    signals: Sequence[str],
    tol: float = 1e-6,
    window: Optional[Tuple[float, float]] = None,
) -> ScenarioComparison:
    """
    检查 variant（输入较大）在各信号上不低于 base

    Raises:
        GridMismatchError: 时间网格不一致
    """
    report = ordering_check(variant, base, signals, tol=tol, window=window)
    return ScenarioComparison(
        base=base.name,
        variant=variant.name,
        signals=tuple(signals),
        report=report,
        window=window,
    )


# =============================================================================
# 增益扫描与降阶误差
# =============================================================================


@dataclass(frozen=True)
class GainSweepPoint:
    """增益扫描中的一个点"""

    scale: float
    regime: RegimeReport
    verdict: MonotoneVerdict
    certificate: GershgorinCertificate
    offdiag_sign: str = ""

    def to_dict(self) -> Dict[str, Any]:
        return {
            "scale": self.scale,
            "regime": self.regime.to_dict(),
            "verdict": self.verdict.verdict.value,
            "is_metzler_state": self.verdict.is_metzler_state,
            "certified_stable": self.certificate.certified_stable,
            "spectral_abscissa": self.certificate.spectral_abscissa,
            "offdiag_sign": self.offdiag_sign,
        }


def gain_sweep(
    case: CaseFile,
    scales: Sequence[float],
    config: Optional[Dict[str, Any]] = None,
    quiet: bool = True,
) -> List[GainSweepPoint]:
    """
    按比例缩放全部电压调节增益（同步机 K_A、变流器 K_u），在平衡点处分类降阶系统

    每个点重新初始化平衡点（V_ref 随增益变化）。

    Args:
        case: 算例
        scales: 增益缩放系数
        config: 配置字典（取 ANALYSIS.EPS_REL 与 OFFDIAG_THRESHOLD）
        quiet: 是否静默
    """
    analysis = (config or {}).get("ANALYSIS", {})
    eps_rel = float(analysis.get("EPS_REL", 1e-6))
    threshold = float(analysis.get("OFFDIAG_THRESHOLD", 0.1))

    points: List[GainSweepPoint] = []
    for scale in scales:
        scaled = case.scale_device_params({"K_A": scale, "K_u": scale})
        eq = init_equilibrium(scaled, config, quiet=True)
        rj = reduced_jacobian(eq.system, eq.x, eq.V, eps_rel=eps_rel)
        report = trajectory_jacobian(eq.system, eq.system.project_exciters(eq.x, eq.V), eq.V)
        J = rj.matrix
        eps = eps_rel * float(np.max(np.abs(J))) if J.size else 0.0
        point = GainSweepPoint(
            scale=float(scale),
            regime=classify_regime(J, threshold=threshold, eps_rel=eps_rel),
            verdict=check_theorem1(J, reduced_input_matrix(eq.system), output_matrix(eq.system, report), eps=eps),
            certificate=gershgorin_certificate(J),
            offdiag_sign=rj.offdiag_sign,
        )
        points.append(point)
        if not quiet:
            print(f"[分析] 增益 ×{scale:g}: {point.regime.regime.value}, {point.verdict.verdict.value}")
    return points


@dataclass(frozen=True)
class TikhonovPoint:
    """时间常数缩放后全阶与降阶 ℰ 轨迹的最大偏差"""

    scale: float
    gap: float
    failed: bool = False
    labels: Tuple[str, ...] = field(default=())

    def to_dict(self) -> Dict[str, Any]:
        return {"scale": self.scale, "gap": self.gap, "failed": self.failed}


def tikhonov_gap(
    case: CaseFile,
    scenario: Scenario,
    scales: Sequence[float] = (1.0, 0.3, 0.1),
    config: Optional[Dict[str, Any]] = None,
    quiet: bool = True,
) -> List[TikhonovPoint]:
    """
    快速时间常数（T_A、T_w）按比例缩小时，全阶与降阶模型 ℰ 轨迹的 sup 范数偏差

    Args:
        case: 算例
        scenario: 小扰动场景（通常为参考值小阶跃）
        scales: 时间常数缩放系数
        config: 配置字典
        quiet: 是否静默
    """
    points: List[TikhonovPoint] = []
    for scale in scales:
        scaled = case.scale_device_params({"T_A": scale, "T_w": scale})
        eq = init_equilibrium(scaled, config, quiet=True)
        full = run(scenario, eq)
        red = run_reduced(scenario, eq)
        idx = eq.system.layout.internal_index
        n = min(len(full.times), len(red.times))
        gap = float(np.max(np.abs(full.states[:n, idx] - red.states[:n, idx]))) if n else float("nan")
        point = TikhonovPoint(
            scale=float(scale),
            gap=gap,
            failed=full.failed or red.failed,
            labels=tuple(eq.system.layout.labels[i] for i in idx),
        )
        points.append(point)
        if not quiet:
            print(f"[分析] 时间常数 ×{scale:g}: ℰ 最大偏差 {gap:.3e}")
    return points
