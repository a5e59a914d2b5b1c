# coding=utf-8
"""
算例文件解析模块

算例为带版本头的 YAML 文本（首个键 format: voltmono-case/1），分节描述：

    system     基准容量、频率、平衡母线
    buses      母线（外部编号 number）
    branches   支路 from / to / r / x / b / tap
    devices    动态设备，kind = sg | gfm，参数块 params
    loads      负荷 p / q（标幺）或 p_mw / q_mvar，model = constant_power | constant_impedance
    scenarios  场景及事件

算例中所有母线引用都用外部编号；MW/Mvar 与机组基准 mbase 在解析时换算到系统基准，
序列化时只写标幺值，因此 parse → serialize → parse 得到相同的 CaseFile。
"""

import hashlib
from dataclasses import dataclass, field, fields, replace
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence, Tuple, Union

import numpy as np
import yaml

from voltmono.core.system import PowerSystem
from voltmono.devices.gfm import GfmParams, GridFormingConverter
from voltmono.devices.sg import SgParams, SynchronousGenerator
from voltmono.network.admittance import Branch, Bus, BusKind, build_admittance
from voltmono.network.solver import DEFAULT_V_FLOOR
from voltmono.utils.errors import ParseError, UnknownTargetError, ValidationError

CASE_FORMAT = "voltmono-case/1"
EVENT_KINDS = ("fault_on", "fault_off", "vref_step", "qref_step", "load_shed")
DATA_DIR = Path(__file__).parent / "data"

SG_REQUIRED = ("x_d", "x_q", "x_d_prime", "T_d0_prime", "K_A", "T_A", "H")
GFM_REQUIRED = ("K_i", "K_d", "T_w", "K_u", "H_vir")
# 可缺省字段及默认值（缺省时打印提示）
SG_DEFAULTS = {"D": 0.0}
GFM_DEFAULTS = {"x_l": 0.1, "K_q": 0.1, "D_vir": 0.0}

# 随机组基准换算的参数：阻抗类乘 S_sys/S_m，惯量与阻尼乘 S_m/S_sys
_IMPEDANCE_FIELDS = ("x_d", "x_q", "x_d_prime", "x_l")
_INERTIA_FIELDS = ("H", "D", "H_vir", "D_vir")


# =============================================================================
# 数据结构
# =============================================================================


@dataclass(frozen=True)
class SystemInfo:
    base_mva: float = 100.0
    frequency_hz: float = 60.0
    slack_bus: int = 1


@dataclass(frozen=True)
class BusRecord:
    number: int
    base_kv: float = 0.0


@dataclass(frozen=True)
class BranchRecord:
    from_bus: int
    to_bus: int
    r: float
    x: float
    b: float = 0.0
    tap: float = 1.0


@dataclass(frozen=True)
class DeviceRecord:
    kind: str                       # "sg" | "gfm"
    bus: int
    params: Union[SgParams, GfmParams]
    name: str = ""
    p_set: float = 0.0              # 有功出力（标幺，平衡母线忽略）
    v_set: float = 1.0              # 端电压设定


@dataclass(frozen=True)
class LoadRecord:
    bus: int
    p: float
    q: float
    model: str = "constant_power"


@dataclass(frozen=True)
class EventRecord:
    t: float
    kind: str
    bus: int
    value: float = 0.0
    dp: float = 0.0
    dq: float = 0.0
    admittance: Optional[complex] = None


@dataclass(frozen=True)
class ScenarioRecord:
    name: str
    t_end: float
    dt: Optional[float] = None
    jacobian_stride: Optional[int] = None
    record: Tuple[str, ...] = ()
    events: Tuple[EventRecord, ...] = ()


@dataclass(frozen=True)
class CaseFile:
    """解析后的算例"""

    name: str
    system: SystemInfo
    buses: Tuple[BusRecord, ...]
    branches: Tuple[BranchRecord, ...]
    devices: Tuple[DeviceRecord, ...]
    loads: Tuple[LoadRecord, ...] = ()
    scenarios: Tuple[ScenarioRecord, ...] = ()
    description: str = ""
    source: str = field(default="", compare=False)

    def scenario(self, name: str) -> ScenarioRecord:
        for sc in self.scenarios:
            if sc.name == name:
                return sc
        raise UnknownTargetError(f"场景 {name}（可用: {', '.join(s.name for s in self.scenarios)}）")

    def bus_numbers(self) -> List[int]:
        return sorted(b.number for b in self.buses)

    def bus_id(self, number: int) -> int:
        """外部编号 → 内部编号（按编号升序排列）"""
        numbers = self.bus_numbers()
        try:
            return numbers.index(number)
        except ValueError:
            raise UnknownTargetError(f"母线 {number}")

    def with_device_params(self, **changes) -> "CaseFile":
        """按字段名批量替换设备参数（仅替换该设备参数类型具有的字段）"""
        devices = []
        for dev in self.devices:
            names = {f.name for f in fields(dev.params)}
            own = {k: v for k, v in changes.items() if k in names}
            devices.append(replace(dev, params=replace(dev.params, **own)) if own else dev)
        return replace(self, devices=tuple(devices))

    def scale_device_params(self, factors: Dict[str, float]) -> "CaseFile":
        """按字段名把设备参数乘以系数，例如 {"K_A": 0.1, "K_u": 0.1}"""
        devices = []
        for dev in self.devices:
            names = {f.name for f in fields(dev.params)}
            own = {k: getattr(dev.params, k) * s for k, s in factors.items() if k in names}
            devices.append(replace(dev, params=replace(dev.params, **own)) if own else dev)
        return replace(self, devices=tuple(devices))

    def with_load(self, bus: int, p: float, q: float) -> "CaseFile":
        """替换（或新增）某母线的恒功率负荷"""
        loads = [ld for ld in self.loads if not (ld.bus == bus and ld.model == "constant_power")]
        loads.append(LoadRecord(bus=bus, p=p, q=q))
        return replace(self, loads=tuple(sorted(loads, key=lambda ld: (ld.bus, ld.model))))


@dataclass(frozen=True, eq=False)
class PowerFlowSpec:
    """潮流输入（内部编号）"""

    p_spec: np.ndarray
    q_spec: np.ndarray
    v_set: np.ndarray
    pv_buses: Tuple[int, ...]


# =============================================================================
# 解析
# =============================================================================


def _require(block: Dict, key: str, path: str) -> Any:
    if not isinstance(block, dict):
        raise ValidationError(path, "必须是键值映射")
    if key not in block or block[key] is None:
        raise ValidationError(f"{path}.{key}", "缺少必填字段")
    return block[key]


def _as_float(value: Any, path: str) -> float:
    try:
        return float(value)
    except (TypeError, ValueError):
        raise ValidationError(path, f"不是数值: {value!r}")


def _as_list(data: Dict, key: str) -> List[Any]:
    value = data.get(key) or []
    if not isinstance(value, list):
        raise ValidationError(key, "必须是列表")
    return value


def _power(block: Dict, key: str, mw_key: str, base_mva: float, path: str) -> float:
    """p / q 取标幺值，p_mw / q_mvar 按系统基准换算"""
    if key in block:
        return _as_float(block[key], f"{path}.{key}")
    if mw_key in block:
        return _as_float(block[mw_key], f"{path}.{mw_key}") / base_mva
    return 0.0


def _parse_system(data: Dict) -> SystemInfo:
    block = _require(data, "system", "case")
    info = SystemInfo(
        base_mva=_as_float(block.get("base_mva", 100.0), "system.base_mva"),
        frequency_hz=_as_float(block.get("frequency_hz", 60.0), "system.frequency_hz"),
        slack_bus=int(_require(block, "slack_bus", "system")),
    )
    if info.base_mva <= 0:
        raise ValidationError("system.base_mva", "必须大于 0")
    return info


def _parse_buses(data: Dict) -> Tuple[BusRecord, ...]:
    buses = []
    for i, item in enumerate(_as_list(data, "buses")):
        if isinstance(item, int):
            buses.append(BusRecord(number=item))
            continue
        path = f"buses[{i}]"
        buses.append(BusRecord(
            number=int(_require(item, "number", path)),
            base_kv=_as_float(item.get("base_kv", 0.0), f"{path}.base_kv"),
        ))
    if not buses:
        raise ValidationError("buses", "至少需要一条母线")
    numbers = [b.number for b in buses]
    if len(set(numbers)) != len(numbers):
        raise ValidationError("buses", "母线编号重复")
    return tuple(sorted(buses, key=lambda b: b.number))


def _parse_branches(data: Dict) -> Tuple[BranchRecord, ...]:
    branches = []
    for i, item in enumerate(_as_list(data, "branches")):
        path = f"branches[{i}]"
        tap = item.get("tap", 1.0)
        branches.append(BranchRecord(
            from_bus=int(_require(item, "from", path)),
            to_bus=int(_require(item, "to", path)),
            r=_as_float(item.get("r", 0.0), f"{path}.r"),
            x=_as_float(_require(item, "x", path), f"{path}.x"),
            b=_as_float(item.get("b", 0.0), f"{path}.b"),
            # 变比 0 表示标准变比
            tap=1.0 if not tap else _as_float(tap, f"{path}.tap"),
        ))
    return tuple(branches)


def _device_params(kind: str, raw: Dict, path: str, ratio: float, quiet: bool):
    """
    构建设备参数，缺省字段取默认值并打印提示

    ratio = S_sys / S_mbase
    """
    if kind == "sg":
        required, defaults, cls = SG_REQUIRED, SG_DEFAULTS, SgParams
    else:
        required, defaults, cls = GFM_REQUIRED, GFM_DEFAULTS, GfmParams

    values: Dict[str, float] = {}
    for key in required:
        values[key] = _as_float(_require(raw, key, path), f"{path}.{key}")
    for key, default in defaults.items():
        if key in raw and raw[key] is not None:
            values[key] = _as_float(raw[key], f"{path}.{key}")
        else:
            values[key] = default
            if not quiet:
                print(f"[算例] {path}.{key} 未给出，使用默认值 {default}")

    known = {f.name for f in fields(cls)}
    unknown = sorted(set(raw) - known)
    if unknown:
        raise ValidationError(f"{path}.{unknown[0]}", "未知参数")
    # V_ref / P_m / Q_ref / P_ref 由初始化给出，文件中可选
    for key in set(raw) - set(values):
        values[key] = _as_float(raw[key], f"{path}.{key}")

    if ratio != 1.0:
        for key in _IMPEDANCE_FIELDS:
            if key in values:
                values[key] *= ratio
        for key in _INERTIA_FIELDS:
            if key in values:
                values[key] /= ratio
    return cls(**values)


def _parse_devices(data: Dict, system: SystemInfo, quiet: bool) -> Tuple[DeviceRecord, ...]:
    devices = []
    for i, item in enumerate(_as_list(data, "devices")):
        path = f"devices[{i}]"
        kind = str(_require(item, "kind", path)).lower()
        if kind not in ("sg", "gfm"):
            raise ValidationError(f"{path}.kind", f"未知设备类型 {kind}")
        mbase = _as_float(item.get("mbase", system.base_mva), f"{path}.mbase")
        if mbase <= 0:
            raise ValidationError(f"{path}.mbase", "必须大于 0")
        params = _device_params(kind, _require(item, "params", path), f"{path}.params", system.base_mva / mbase, quiet)
        devices.append(DeviceRecord(
            kind=kind,
            bus=int(_require(item, "bus", path)),
            params=params,
            name=str(item.get("name", "")),
            p_set=_power(item, "p_set", "p_mw", system.base_mva, path),
            v_set=_as_float(item.get("v_set", 1.0), f"{path}.v_set"),
        ))
    buses = [d.bus for d in devices]
    if len(set(buses)) != len(buses):
        raise ValidationError("devices", "每条母线至多一台设备")
    return tuple(sorted(devices, key=lambda d: d.bus))


def _parse_loads(data: Dict, system: SystemInfo) -> Tuple[LoadRecord, ...]:
    loads = []
    for i, item in enumerate(_as_list(data, "loads")):
        path = f"loads[{i}]"
        model = str(item.get("model", "constant_power"))
        if model not in ("constant_power", "constant_impedance"):
            raise ValidationError(f"{path}.model", f"未知负荷模型 {model}")
        loads.append(LoadRecord(
            bus=int(_require(item, "bus", path)),
            p=_power(item, "p", "p_mw", system.base_mva, path),
            q=_power(item, "q", "q_mvar", system.base_mva, path),
            model=model,
        ))
    return tuple(sorted(loads, key=lambda ld: (ld.bus, ld.model)))


def _parse_event(item: Dict, path: str, base_mva: float) -> EventRecord:
    kind = str(_require(item, "kind", path))
    if kind not in EVENT_KINDS:
        raise ValidationError(f"{path}.kind", f"未知事件类型 {kind}")
    admittance = item.get("admittance")
    return EventRecord(
        t=_as_float(_require(item, "t", path), f"{path}.t"),
        kind=kind,
        bus=int(_require(item, "bus", path)),
        value=_as_float(item.get("value", 0.0), f"{path}.value"),
        dp=_power(item, "dp", "dp_mw", base_mva, path),
        dq=_power(item, "dq", "dq_mvar", base_mva, path),
        admittance=None if admittance is None else complex(str(admittance).replace(" ", "")),
    )


def _parse_scenarios(data: Dict, system: SystemInfo) -> Tuple[ScenarioRecord, ...]:
    scenarios = []
    for i, item in enumerate(_as_list(data, "scenarios")):
        path = f"scenarios[{i}]"
        events = tuple(
            _parse_event(ev, f"{path}.events[{j}]", system.base_mva)
            for j, ev in enumerate(item.get("events") or [])
        )
        dt = item.get("dt")
        stride = item.get("jacobian_stride")
        scenarios.append(ScenarioRecord(
            name=str(_require(item, "name", path)),
            t_end=_as_float(_require(item, "t_end", path), f"{path}.t_end"),
            dt=None if dt is None else _as_float(dt, f"{path}.dt"),
            jacobian_stride=None if stride is None else int(stride),
            record=tuple(str(s) for s in (item.get("record") or [])),
            events=tuple(sorted(events, key=lambda e: e.t)),
        ))
    names = [s.name for s in scenarios]
    if len(set(names)) != len(names):
        raise ValidationError("scenarios", "场景名重复")
    return tuple(scenarios)


def _check_references(case: CaseFile) -> None:
    numbers = set(case.bus_numbers())
    if case.system.slack_bus not in numbers:
        raise ValidationError("system.slack_bus", f"母线 {case.system.slack_bus} 不存在")
    for i, br in enumerate(case.branches):
        for end in (br.from_bus, br.to_bus):
            if end not in numbers:
                raise ValidationError(f"branches[{i}]", f"母线 {end} 不存在")
    for dev in case.devices:
        if dev.bus not in numbers:
            raise ValidationError(f"devices.{dev.name or dev.bus}", f"母线 {dev.bus} 不存在")
    if case.system.slack_bus not in {d.bus for d in case.devices}:
        raise ValidationError("system.slack_bus", "平衡母线上必须有动态设备")
    for ld in case.loads:
        if ld.bus not in numbers:
            raise ValidationError("loads", f"母线 {ld.bus} 不存在")
    for sc in case.scenarios:
        for ev in sc.events:
            if ev.bus not in numbers:
                raise ValidationError(f"scenarios.{sc.name}", f"事件母线 {ev.bus} 不存在")


def parse_case_text(text: str, source: str = "<string>", quiet: bool = True) -> CaseFile:
    """
    解析算例文本

    Raises:
        ParseError: YAML 语法错误或缺少格式头
        ValidationError: 字段缺失或取值非法
    """
    try:
        data = yaml.safe_load(text)
    except yaml.YAMLError as e:
        mark = getattr(e, "problem_mark", None)
        line = mark.line + 1 if mark is not None else 0
        raise ParseError(line, str(getattr(e, "problem", None) or e))

    if not isinstance(data, dict):
        raise ParseError(1, "算例文件必须是键值映射")
    header = data.get("format")
    if header != CASE_FORMAT:
        raise ParseError(1, f"格式头应为 'format: {CASE_FORMAT}'，实际 {header!r}")

    system = _parse_system(data)
    case = CaseFile(
        name=str(data.get("name", Path(source).stem)),
        system=system,
        buses=_parse_buses(data),
        branches=_parse_branches(data),
        devices=_parse_devices(data, system, quiet),
        loads=_parse_loads(data, system),
        scenarios=_parse_scenarios(data, system),
        description=str(data.get("description", "")),
        source=source,
    )
    _check_references(case)
    return case


def parse_case(path: Union[str, Path], quiet: bool = True) -> CaseFile:
    """
    读取并解析算例文件

    Args:
        path: 算例文件路径
        quiet: 是否静默（缺省值提示仍受此开关控制）

    Returns:
        CaseFile

    Raises:
        FileNotFoundError: 文件不存在
        ParseError / ValidationError: 内容错误
    """
    path = Path(path)
    if not path.exists():
        raise FileNotFoundError(f"算例文件 {path} 不存在")
    text = path.read_text(encoding="utf-8")
    case = parse_case_text(text, source=str(path), quiet=quiet)
    if not quiet:
        print(f"[算例] 已加载 {case.name}: {len(case.buses)} 母线, {len(case.devices)} 设备")
    return case


def bundled_cases() -> List[str]:
    return sorted(p.stem for p in DATA_DIR.glob("*.yaml"))


def load_bundled(name: str, quiet: bool = True) -> CaseFile:
    """加载内置算例（smib / case39_sg / case39_gfm）"""
    path = DATA_DIR / f"{name}.yaml"
    if not path.exists():
        raise FileNotFoundError(f"内置算例 {name} 不存在，可用: {', '.join(bundled_cases())}")
    return parse_case(path, quiet=quiet)


def resolve_case(ref: str, quiet: bool = True) -> CaseFile:
    """命令行 --case 参数：优先按路径读取，否则按内置算例名加载"""
    if Path(ref).exists():
        return parse_case(ref, quiet=quiet)
    return load_bundled(ref, quiet=quiet)


# =============================================================================
# 序列化
# =============================================================================


def _params_dict(params) -> Dict[str, float]:
    return {f.name: float(getattr(params, f.name)) for f in fields(params)}


def _case_to_dict(case: CaseFile) -> Dict[str, Any]:
    data: Dict[str, Any] = {"format": CASE_FORMAT, "name": case.name}
    if case.description:
        data["description"] = case.description
    data["system"] = {
        "base_mva": case.system.base_mva,
        "frequency_hz": case.system.frequency_hz,
        "slack_bus": case.system.slack_bus,
    }
    data["buses"] = [{"number": b.number, "base_kv": b.base_kv} for b in case.buses]
    data["branches"] = [
        {"from": br.from_bus, "to": br.to_bus, "r": br.r, "x": br.x, "b": br.b, "tap": br.tap}
        for br in case.branches
    ]
    data["devices"] = [
        {
            "kind": d.kind,
            "bus": d.bus,
            "name": d.name,
            "p_set": d.p_set,
            "v_set": d.v_set,
            "params": _params_dict(d.params),
        }
        for d in case.devices
    ]
    data["loads"] = [{"bus": ld.bus, "p": ld.p, "q": ld.q, "model": ld.model} for ld in case.loads]
    scenarios = []
    for sc in case.scenarios:
        item: Dict[str, Any] = {"name": sc.name, "t_end": sc.t_end}
        if sc.dt is not None:
            item["dt"] = sc.dt
        if sc.jacobian_stride is not None:
            item["jacobian_stride"] = sc.jacobian_stride
        if sc.record:
            item["record"] = list(sc.record)
        events = []
        for ev in sc.events:
            e: Dict[str, Any] = {"t": ev.t, "kind": ev.kind, "bus": ev.bus}
            if ev.value:
                e["value"] = ev.value
            if ev.dp:
                e["dp"] = ev.dp
            if ev.dq:
                e["dq"] = ev.dq
            if ev.admittance is not None:
                e["admittance"] = str(ev.admittance)
            events.append(e)
        item["events"] = events
        scenarios.append(item)
    data["scenarios"] = scenarios
    return data


def serialize_case(case: CaseFile) -> str:
    """CaseFile → 算例文本（全部为标幺值）"""
    return yaml.safe_dump(_case_to_dict(case), sort_keys=False, allow_unicode=True, default_flow_style=None)


def case_hash(case: CaseFile) -> str:
    """规范化文本的 SHA-256"""
    return hashlib.sha256(serialize_case(case).encode("utf-8")).hexdigest()


# =============================================================================
# 构建系统与场景
# =============================================================================


def build_system(case: CaseFile, config: Optional[Dict[str, Any]] = None) -> Tuple[PowerSystem, PowerFlowSpec]:
    """
    由算例构建 PowerSystem 与潮流输入

    内部编号按外部编号升序分配；恒阻抗负荷以 conj(S) 并入 Y，恒功率负荷进入 load_power。
    设备参数中的 V_ref / P_m 等参考值在 init_equilibrium 中重新确定。

    Raises:
        TopologyError: 网络结构非法
    """
    network_cfg = (config or {}).get("NETWORK", {})
    numbers = case.bus_numbers()
    index = {num: i for i, num in enumerate(numbers)}
    n = len(numbers)
    device_buses = {d.bus for d in case.devices}
    load_buses = {ld.bus for ld in case.loads}

    buses = []
    for rec in case.buses:
        if rec.number == case.system.slack_bus:
            kind = BusKind.SLACK
        elif rec.number in device_buses:
            kind = BusKind.DEVICE
        elif rec.number in load_buses:
            kind = BusKind.LOAD
        else:
            kind = BusKind.PASSIVE
        buses.append(Bus(id=index[rec.number], number=rec.number, base_kv=rec.base_kv, kind=kind))

    branches = [
        Branch(index[br.from_bus], index[br.to_bus], br.r, br.x, b_shunt=br.b, tap=br.tap)
        for br in case.branches
    ]

    shunt = np.zeros(n, dtype=complex)
    load_power = np.zeros(n, dtype=complex)
    for ld in case.loads:
        if ld.model == "constant_impedance":
            shunt[index[ld.bus]] += complex(ld.p, -ld.q)
        else:
            load_power[index[ld.bus]] += complex(ld.p, ld.q)

    net = build_admittance(buses, branches, shunt_loads=shunt)

    devices = []
    for rec in case.devices:
        cls = SynchronousGenerator if rec.kind == "sg" else GridFormingConverter
        devices.append(cls(bus=index[rec.bus], params=rec.params, name=rec.name))

    system = PowerSystem(
        network=net,
        devices=tuple(devices),
        load_power=load_power,
        omega_s=2.0 * np.pi * case.system.frequency_hz,
        load_break=float(network_cfg.get("LOAD_BREAK_VOLTAGE", 0.7)),
        newton_tol=float(network_cfg.get("NEWTON_TOL", 1e-10)),
        max_iterations=int(network_cfg.get("MAX_ITERATIONS", 50)),
        v_floor=float(network_cfg.get("V_FLOOR", DEFAULT_V_FLOOR)),
    )

    p_spec = -load_power.real.copy()
    q_spec = -load_power.imag.copy()
    v_set = np.ones(n)
    for rec in case.devices:
        i = index[rec.bus]
        p_spec[i] += rec.p_set
        v_set[i] = rec.v_set
    pv = tuple(index[d.bus] for d in case.devices if d.bus != case.system.slack_bus)
    return system, PowerFlowSpec(p_spec=p_spec, q_spec=q_spec, v_set=v_set, pv_buses=pv)



def scenario_names(case: CaseFile) -> Sequence[str]:
    return [s.name for s in case.scenarios]
