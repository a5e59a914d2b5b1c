# coding=utf-8
"""
节点导纳矩阵模块

负责由母线/支路数据构建复数节点导纳矩阵 Y，以及设备内阻抗增广后的
Y_aug 与阻抗矩阵 Z = Y_aug⁻¹。

符号约定：注入电流 I = Y·V，Y_ii = Σ y_ij + 对地支路，Y_ij = −y_ij。
"""

from dataclasses import dataclass, field
from enum import Enum
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np
import scipy.linalg
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import connected_components

from voltmono.utils.errors import SingularMatrixError, TopologyError


class BusKind(str, Enum):
    """母线类型"""

    SLACK = "slack"
    DEVICE = "device"
    LOAD = "load"
    PASSIVE = "passive"


@dataclass(frozen=True)
class Bus:
    """母线"""

    id: int                         # 内部编号，0..n−1 连续
    number: int = 0                 # 算例中的外部编号（如 IEEE-39 的 1..39）
    base_kv: float = 0.0            # 仅用于展示
    kind: BusKind = BusKind.PASSIVE

    @property
    def label(self) -> str:
        return str(self.number if self.number else self.id)


@dataclass(frozen=True)
class Branch:
    """支路（线路或变压器），标幺值"""

    from_bus: int
    to_bus: int
    r: float
    x: float
    b_shunt: float = 0.0            # 全线充电电纳
    tap: float = 1.0                # 非标准变比，作用在 from 侧

    @property
    def admittance(self) -> complex:
        return 1.0 / complex(self.r, self.x)


@dataclass(frozen=True, eq=False)
class NetworkModel:
    """
    网络模型

    构建后不可变；故障通过 with_faults 生成新的模型，基础 Y 始终保留，
    因此投入再切除故障可以逐位恢复 Y。
    """

    buses: Tuple[Bus, ...]
    branches: Tuple[Branch, ...]
    Y: np.ndarray
    slack: int
    shunt_loads: np.ndarray
    base_Y: np.ndarray
    faults: Tuple[Tuple[int, complex], ...] = field(default=())

    @property
    def n(self) -> int:
        return len(self.buses)

    def bus_index(self, number: int) -> int:
        """外部编号 → 内部编号"""
        for bus in self.buses:
            if bus.number == number:
                return bus.id
        raise TopologyError(f"母线 {number} 不存在")

    def with_faults(self, faults: Dict[int, complex]) -> "NetworkModel":
        """返回叠加了接地故障导纳的新模型（faults 为空时 Y 与 base_Y 逐位相同）"""
        Y = self.base_Y.copy()
        for bus, y in sorted(faults.items()):
            Y[bus, bus] += y
        Y.setflags(write=False)
        return NetworkModel(
            buses=self.buses,
            branches=self.branches,
            Y=Y,
            slack=self.slack,
            shunt_loads=self.shunt_loads,
            base_Y=self.base_Y,
            faults=tuple(sorted(faults.items())),
        )

    def fault_dict(self) -> Dict[int, complex]:
        return dict(self.faults)


def _check_connected(n: int, branches: Sequence[Branch]) -> None:
    if n <= 1:
        return
    rows = [br.from_bus for br in branches]
    cols = [br.to_bus for br in branches]
    graph = csr_matrix((np.ones(len(rows)), (rows, cols)), shape=(n, n))
    count, _ = connected_components(graph, directed=False)
    if count > 1:
        raise TopologyError(f"网络不连通（{count} 个连通分量），网络方程将奇异")


def build_admittance(
    buses: Sequence[Bus],
    branches: Sequence[Branch],
    shunt_loads: Optional[Sequence[complex]] = None,
) -> NetworkModel:
    """
    构建节点导纳矩阵

    Args:
        buses: 母线列表，id 必须为 0..n−1
        branches: 支路列表
        shunt_loads: 各母线恒阻抗负荷导纳（长度 n），并入 Y 对角元

    Returns:
        NetworkModel

    Raises:
        TopologyError: 编号不连续、端点非法、阻抗为零、平衡节点不唯一或网络不连通

    Examples:
        单条 x=0.5 支路: Y = [[−2j, 2j], [2j, −2j]]
    """
    buses = tuple(sorted(buses, key=lambda b: b.id))
    n = len(buses)
    if [b.id for b in buses] != list(range(n)):
        raise TopologyError("母线编号必须为 0..n−1 且连续")

    slack_ids = [b.id for b in buses if b.kind == BusKind.SLACK]
    if len(slack_ids) != 1:
        raise TopologyError(f"平衡节点必须唯一，当前 {len(slack_ids)} 个")

    if shunt_loads is None:
        shunt = np.zeros(n, dtype=complex)
    else:
        shunt = np.array(shunt_loads, dtype=complex)
        if shunt.shape != (n,):
            raise TopologyError(f"shunt_loads 长度 {shunt.shape} 与母线数 {n} 不一致")

    Y = np.zeros((n, n), dtype=complex)
    for br in branches:
        f, t = br.from_bus, br.to_bus
        if not (0 <= f < n and 0 <= t < n):
            raise TopologyError(f"支路端点越界: {f}-{t}")
        if f == t:
            raise TopologyError(f"支路首末端相同: {f}")
        if br.r == 0.0 and br.x == 0.0:
            raise TopologyError(f"支路 {f}-{t} 阻抗为零")
        if br.tap <= 0.0:
            raise TopologyError(f"支路 {f}-{t} 变比必须为正")
        y = br.admittance
        half_b = 1j * br.b_shunt / 2.0
        a = br.tap
        Y[f, f] += (y + half_b) / (a * a)
        Y[t, t] += y + half_b
        Y[f, t] -= y / a
        Y[t, f] -= y / a

    Y[np.diag_indices(n)] += shunt
    _check_connected(n, branches)

    Y.setflags(write=False)
    shunt.setflags(write=False)
    return NetworkModel(
        buses=buses,
        branches=tuple(branches),
        Y=Y,
        slack=slack_ids[0],
        shunt_loads=shunt,
        base_Y=Y,
    )


def augmented_admittance(net: NetworkModel, device_shunt_terms: Sequence[complex]) -> np.ndarray:
    """
    设备内导纳增广：Y_aug = Y − diag(terms)

    同步机母线 term = 0.5j(1/x_q + 1/x′_d)，构网型变流器母线 term = j/x_l，
    其余母线为 0。

    Raises:
        TopologyError: 维度不一致
    """
    terms = np.asarray(device_shunt_terms, dtype=complex)
    if terms.shape != (net.n,):
        raise TopologyError(f"设备并联项长度 {terms.shape} 与母线数 {net.n} 不一致")
    return net.Y - np.diag(terms)


@dataclass(frozen=True, eq=False)
class ImpedanceReport:
    """阻抗矩阵及其结构指标"""

    Z: np.ndarray
    nonneg_fraction: float          # Re(−jZ) ≥ 0 的元素比例
    dominance_fraction: float       # 对角元为本行模值最大元素的行比例
    dominant_rows: List[bool]
    rowsum_dominance_fraction: float = 0.0  # |Z_ii| ≥ Σ_{j≠i}|Z_ij| 的行比例

    def to_dict(self) -> Dict:
        return {
            "nonneg_fraction": self.nonneg_fraction,
            "dominance_fraction": self.dominance_fraction,
            "rowsum_dominance_fraction": self.rowsum_dominance_fraction,
            "n": int(self.Z.shape[0]),
        }


def impedance_matrix(Y_aug: np.ndarray, tol: float = 1e-12) -> ImpedanceReport:
    """
    求阻抗矩阵 Z = Y_aug⁻¹ 并统计非负性与对角占优程度

    感性网络中 Y_aug ≈ −jM（M 为 M 矩阵），于是 −jZ = M⁻¹ ≥ 0，
    非负性在 Re(−jZ) 上统计。对角占优按元素比较：对角元不小于同行任一非对角元，
    行和意义下的占优另行统计。

    Raises:
        SingularMatrixError: Y_aug 奇异
    """
    Y_aug = np.asarray(Y_aug, dtype=complex)
    n = Y_aug.shape[0]
    try:
        Z = scipy.linalg.solve(Y_aug, np.eye(n, dtype=complex))
    except scipy.linalg.LinAlgError as e:
        raise SingularMatrixError(f"Y_aug 奇异: {e}")
    if not np.all(np.isfinite(Z)):
        raise SingularMatrixError("Y_aug 奇异: 求逆结果含非有限值")

    scaled = (-1j * Z).real
    scale = max(float(np.max(np.abs(Z))), 1e-300)
    nonneg = float(np.mean(scaled >= -tol * scale))

    mag = np.abs(Z)
    diag = np.diag(mag)
    off = mag - np.diag(diag)
    dominant = [bool(d >= o) for d, o in zip(diag, off.max(axis=1, initial=0.0))]
    dominance = float(np.mean(dominant)) if n else 1.0
    rowsum = float(np.mean(diag >= off.sum(axis=1))) if n else 1.0

    return ImpedanceReport(
        Z=Z,
        nonneg_fraction=nonneg,
        dominance_fraction=dominance,
        dominant_rows=dominant,
        rowsum_dominance_fraction=rowsum,
    )
