# coding=utf-8
"""
时间序列模块

仿真结果容器：状态、复电压、派生信号与雅可比快照。
主时间网格严格递增；事件前后的采样单独保存在 event_samples 中，
因此不同事件的场景共享同一网格，可以直接逐点比较。

信号命名：
    <状态名>@<母线>   如 eq@30、evir@30、delta@31
    vm@<母线> / va@<母线>   电压幅值 / 相角
    pe@<母线> / qc@<母线>   设备有功 / 无功输出
    其他名称在 extras 中查找（如线性示例的 y）
"""

from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Sequence, Tuple

import numpy as np

from voltmono.utils.errors import InvalidParameterError


@dataclass(frozen=True, eq=False)
class TimeSeries:
    """仿真轨迹（返回后不可变）"""

    times: np.ndarray
    states: np.ndarray                      # T × m
    voltages: np.ndarray                    # T × n 复
    state_labels: Tuple[str, ...]
    bus_labels: Tuple[str, ...] = ()
    device_labels: Tuple[str, ...] = ()     # 设备所在母线标签
    p_e: Optional[np.ndarray] = None        # T × 设备数
    q_c: Optional[np.ndarray] = None
    extras: Dict[str, np.ndarray] = field(default_factory=dict)
    jacobian_times: Tuple[float, ...] = ()
    jacobians: Tuple[Any, ...] = ()         # JacobianReport 序列
    event_samples: Tuple[Any, ...] = ()
    name: str = ""
    status: str = "complete"
    error: Optional[Dict[str, Any]] = None

    def __len__(self) -> int:
        return len(self.times)

    @property
    def failed(self) -> bool:
        return self.status != "complete"

    def signal_names(self) -> List[str]:
        names = list(self.state_labels)
        names += [f"vm@{b}" for b in self.bus_labels]
        names += [f"va@{b}" for b in self.bus_labels]
        if self.p_e is not None:
            names += [f"pe@{b}" for b in self.device_labels]
        if self.q_c is not None:
            names += [f"qc@{b}" for b in self.device_labels]
        names += sorted(self.extras)
        return names

    def signal(self, name: str) -> np.ndarray:
        """
        按名称取信号

        Raises:
            InvalidParameterError: 未知信号
        """
        if name in self.state_labels:
            return self.states[:, self.state_labels.index(name)]
        if name in self.extras:
            return np.asarray(self.extras[name])
        prefix, _, bus = name.partition("@")
        if bus:
            if prefix in ("vm", "va") and bus in self.bus_labels:
                column = self.voltages[:, self.bus_labels.index(bus)]
                return np.abs(column) if prefix == "vm" else np.angle(column)
            if prefix in ("pe", "qc") and bus in self.device_labels:
                source = self.p_e if prefix == "pe" else self.q_c
                if source is not None:
                    return source[:, self.device_labels.index(bus)]
        raise InvalidParameterError(f"未知信号: {name}")

    def columns(self, signals: Sequence[str]) -> np.ndarray:
        """T × (1 + len(signals))，首列为时间"""
        data = [np.asarray(self.times, dtype=float)]
        data += [np.asarray(self.signal(s), dtype=float) for s in signals]
        return np.column_stack(data) if len(self.times) else np.zeros((0, 1 + len(signals)))

    def sample_at(self, t: float) -> int:
        """离 t 最近的采样下标"""
        return int(np.argmin(np.abs(np.asarray(self.times) - t)))

    def summary(self) -> Dict[str, Any]:
        return {
            "name": self.name,
            "status": self.status,
            "samples": len(self.times),
            "t_end": float(self.times[-1]) if len(self.times) else 0.0,
            "jacobian_snapshots": len(self.jacobians),
            "events": len(self.event_samples),
            "error": self.error,
        }


class TimeSeriesBuilder:
    """逐步累积采样，最后一次性冻结为 TimeSeries"""

    def __init__(
        self,
        state_labels: Sequence[str],
        bus_labels: Sequence[str] = (),
        device_labels: Sequence[str] = (),
        name: str = "",
    ):
        self.state_labels = tuple(state_labels)
        self.bus_labels = tuple(bus_labels)
        self.device_labels = tuple(device_labels)
        self.name = name
        self._times: List[float] = []
        self._states: List[np.ndarray] = []
        self._voltages: List[np.ndarray] = []
        self._p_e: List[np.ndarray] = []
        self._q_c: List[np.ndarray] = []
        self._extras: Dict[str, List[float]] = {}
        self.jacobian_times: List[float] = []
        self.jacobians: List[Any] = []
        self.event_samples: List[Any] = []

    def append(
        self,
        t: float,
        x: np.ndarray,
        V: Optional[np.ndarray] = None,
        p_e: Optional[np.ndarray] = None,
        q_c: Optional[np.ndarray] = None,
        **extras: float,
    ) -> None:
        self._times.append(float(t))
        self._states.append(np.array(x, dtype=float))
        self._voltages.append(np.zeros(0, dtype=complex) if V is None else np.array(V, dtype=complex))
        if p_e is not None:
            self._p_e.append(np.array(p_e, dtype=float))
        if q_c is not None:
            self._q_c.append(np.array(q_c, dtype=float))
        for key, value in extras.items():
            self._extras.setdefault(key, []).append(float(value))

    @property
    def last_time(self) -> float:
        return self._times[-1] if self._times else 0.0

    def add_jacobian(self, t: float, report: Any) -> None:
        self.jacobian_times.append(float(t))
        self.jacobians.append(report)

    def build(self, status: str = "complete", error: Optional[Dict[str, Any]] = None) -> TimeSeries:
        m = len(self.state_labels)
        n = len(self.bus_labels)
        T = len(self._times)
        states = np.array(self._states).reshape(T, m) if T else np.zeros((0, m))
        voltages = np.array(self._voltages).reshape(T, n) if T else np.zeros((0, n), dtype=complex)
        p_e = np.array(self._p_e) if self._p_e else None
        q_c = np.array(self._q_c) if self._q_c else None
        return TimeSeries(
            times=np.array(self._times, dtype=float),
            states=states,
            voltages=voltages,
            state_labels=self.state_labels,
            bus_labels=self.bus_labels,
            device_labels=self.device_labels,
            p_e=p_e,
            q_c=q_c,
            extras={k: np.array(v) for k, v in self._extras.items()},
            jacobian_times=tuple(self.jacobian_times),
            jacobians=tuple(self.jacobians),
            event_samples=tuple(self.event_samples),
            name=self.name,
            status=status,
            error=error,
        )
