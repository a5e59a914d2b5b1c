# coding=utf-8
"""
事件与场景定义

事件在场景局部的系统副本上生效：故障改写网络导纳，参考值阶跃改写设备参数，
切负荷改写恒功率负荷。原始系统对象不受影响。
"""

from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Dict, Optional, Tuple

from voltmono.cases.parser import CaseFile
from voltmono.core.system import PowerSystem
from voltmono.devices.gfm import GridFormingConverter
from voltmono.utils.errors import InvalidParameterError, UnknownTargetError

DEFAULT_FAULT_ADMITTANCE = -1e4j


class EventKind(str, Enum):
    FAULT_ON = "fault_on"
    FAULT_OFF = "fault_off"
    VREF_STEP = "vref_step"
    QREF_STEP = "qref_step"
    LOAD_SHED = "load_shed"


@dataclass(frozen=True)
class Event:
    """
    扰动事件

    bus 为内部母线编号；参考值阶跃作用于该母线上的设备。
    """

    time: float
    kind: EventKind
    bus: int
    value: float = 0.0              # 参考值阶跃量 Δ（标幺）
    dp: float = 0.0                 # 切除有功（标幺）
    dq: float = 0.0                 # 切除无功（标幺）
    admittance: Optional[complex] = None  # 故障导纳，None 取配置默认值

    def __post_init__(self):
        if self.time < 0:
            raise InvalidParameterError(f"事件时刻不能为负: {self.time}")

    def to_dict(self) -> Dict[str, Any]:
        out: Dict[str, Any] = {"t": self.time, "kind": self.kind.value, "bus": self.bus}
        if self.kind in (EventKind.VREF_STEP, EventKind.QREF_STEP):
            out["value"] = self.value
        if self.kind == EventKind.LOAD_SHED:
            out["dp"] = self.dp
            out["dq"] = self.dq
        if self.kind == EventKind.FAULT_ON and self.admittance is not None:
            out["admittance"] = str(self.admittance)
        return out


@dataclass(frozen=True)
class Scenario:
    """仿真场景"""

    name: str = "base"
    events: Tuple[Event, ...] = ()
    t_end: float = 1.0
    dt: float = 1e-3
    record: Tuple[str, ...] = ()
    jacobian_stride: int = 0
    fault_admittance: complex = DEFAULT_FAULT_ADMITTANCE
    case: str = ""

    def __post_init__(self):
        if not self.dt > 0:
            raise InvalidParameterError(f"dt 必须大于 0: {self.dt}")
        if not self.t_end > 0:
            raise InvalidParameterError(f"t_end 必须大于 0: {self.t_end}")
        if self.jacobian_stride < 0:
            raise InvalidParameterError("jacobian_stride 不能为负")
        ordered = tuple(sorted(self.events, key=lambda e: e.time))
        object.__setattr__(self, "events", ordered)

    @property
    def n_steps(self) -> int:
        return int(round(self.t_end / self.dt))


def apply_event(
    system: PowerSystem,
    event: Event,
    fault_admittance: complex = DEFAULT_FAULT_ADMITTANCE,
) -> PowerSystem:
    """
    应用事件，返回新的系统对象

    Args:
        system: 当前系统
        event: 事件
        fault_admittance: 事件未指定导纳时使用的故障导纳

    Returns:
        PowerSystem

    Raises:
        UnknownTargetError: 母线/设备不存在，或切除未投入的故障
    """
    if not 0 <= event.bus < system.n:
        raise UnknownTargetError(f"母线 {event.bus}")

    if event.kind == EventKind.FAULT_ON:
        faults = system.network.fault_dict()
        faults[event.bus] = fault_admittance if event.admittance is None else event.admittance
        return system.with_network(system.network.with_faults(faults))

    if event.kind == EventKind.FAULT_OFF:
        faults = system.network.fault_dict()
        if event.bus not in faults:
            raise UnknownTargetError(f"母线 {event.bus} 上没有投入的故障")
        del faults[event.bus]
        return system.with_network(system.network.with_faults(faults))

    if event.kind == EventKind.VREF_STEP:
        k = system.device_index(event.bus)
        device = system.devices[k]
        return system.with_device(k, device.with_params(V_ref=device.v_ref + event.value))

    if event.kind == EventKind.QREF_STEP:
        k = system.device_index(event.bus)
        device = system.devices[k]
        if not isinstance(device, GridFormingConverter):
            raise UnknownTargetError(f"母线 {event.bus} 上的设备不是构网型变流器")
        return system.with_device(k, device.with_params(Q_ref=device.params.Q_ref + event.value))

    if event.kind == EventKind.LOAD_SHED:
        current = complex(system.load_power[event.bus])
        return system.with_load(event.bus, current - complex(event.dp, event.dq))

    raise UnknownTargetError(event.kind)


@dataclass(frozen=True)
class EventSample:
    """事件前后的采样（不进入主时间网格）"""

    time: float
    kind: str
    bus: int
    pre_vmag: Tuple[float, ...] = field(default=())
    post_vmag: Tuple[float, ...] = field(default=())

    def to_dict(self) -> Dict[str, Any]:
        return {
            "t": self.time,
            "kind": self.kind,
            "bus": self.bus,
            "pre_vmag": list(self.pre_vmag),
            "post_vmag": list(self.post_vmag),
        }


def scenario_from_case(
    case: CaseFile,
    name: str,
    config: Optional[Dict[str, Any]] = None,
    dt: Optional[float] = None,
    t_end: Optional[float] = None,
) -> Scenario:
    """
    算例中的场景记录 → Scenario（事件母线换成内部编号）

    dt / jacobian_stride 的优先级：参数 > 场景记录 > 配置。

    Raises:
        UnknownTargetError: 场景或母线不存在
    """
    rec = case.scenario(name)
    sim_cfg = (config or {}).get("SIMULATION", {})
    net_cfg = (config or {}).get("NETWORK", {})
    events = tuple(
        Event(
            time=ev.t,
            kind=EventKind(ev.kind),
            bus=case.bus_id(ev.bus),
            value=ev.value,
            dp=ev.dp,
            dq=ev.dq,
            admittance=ev.admittance,
        )
        for ev in rec.events
    )
    stride = rec.jacobian_stride
    if stride is None:
        stride = int(sim_cfg.get("JACOBIAN_STRIDE", 0))
    if dt is None:
        dt = rec.dt if rec.dt is not None else float(sim_cfg.get("DT", 1e-3))
    return Scenario(
        name=rec.name,
        events=events,
        t_end=rec.t_end if t_end is None else t_end,
        dt=dt,
        record=rec.record,
        jacobian_stride=stride,
        fault_admittance=complex(net_cfg.get("FAULT_ADMITTANCE", DEFAULT_FAULT_ADMITTANCE)),
        case=case.name,
    )
