# coding=utf-8
"""
单调性判据模块

输入-状态-输出单调判据：
    ∂f/∂x 非对角元 ≥ 0（Metzler），∂f/∂v ≥ 0，∂h/∂x ≥ 0
以及降阶系统的合作/竞争分类。
"""

from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Dict, List, Tuple

import numpy as np

from voltmono.utils.errors import InvalidParameterError


class Verdict(str, Enum):
    INPUT_STATE_OUTPUT_MONOTONE = "input_state_output_monotone"
    INPUT_OUTPUT_ONLY = "input_output_only"
    COMPETITIVE = "competitive"
    INDETERMINATE = "indeterminate"


class Regime(str, Enum):
    COOPERATIVE = "cooperative"
    COMPETITIVE = "competitive"
    MIXED = "mixed"


@dataclass(frozen=True)
class MonotoneVerdict:
    """单调性判定结果"""

    is_metzler_state: bool
    input_nonneg: bool
    output_nonneg: bool
    verdict: Verdict
    violating_entries: List[Tuple[str, int, int, float]] = field(default_factory=list)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "is_metzler_state": self.is_metzler_state,
            "input_nonneg": self.input_nonneg,
            "output_nonneg": self.output_nonneg,
            "verdict": self.verdict.value,
            "violating_entries": [list(v) for v in self.violating_entries],
        }


def _as_2d(M) -> np.ndarray:
    A = np.asarray(M, dtype=float)
    if A.ndim == 1:
        A = A[:, None]
    return A


def check_theorem1(dfdx, dfdv, dhdx, eps: float = 0.0) -> MonotoneVerdict:
    """
    输入-状态-输出单调性判据

    Args:
        dfdx: 状态雅可比 (m × m)
        dfdv: 输入矩阵 (m × k)，一维时视为单列
        dhdx: 输出矩阵 (q × m)，一维时视为单行
        eps: 数值零容差

    Returns:
        MonotoneVerdict；三项均满足时为 input_state_output_monotone

    Raises:
        InvalidParameterError: 维度不一致
    """
    A = np.asarray(dfdx, dtype=float)
    B = _as_2d(dfdv)
    C = np.asarray(dhdx, dtype=float)
    if C.ndim == 1:
        C = C[None, :]
    m = A.shape[0]
    if A.shape != (m, m) or B.shape[0] != m or C.shape[1] != m:
        raise InvalidParameterError(f"维度不一致: dfdx {A.shape}, dfdv {B.shape}, dhdx {C.shape}")

    violations: List[Tuple[str, int, int, float]] = []
    off_mask = ~np.eye(m, dtype=bool)
    for i, j in zip(*np.nonzero(off_mask & (A < -eps))):
        violations.append(("dfdx", int(i), int(j), float(A[i, j])))
    for i, j in zip(*np.nonzero(B < -eps)):
        violations.append(("dfdv", int(i), int(j), float(B[i, j])))
    for i, j in zip(*np.nonzero(C < -eps)):
        violations.append(("dhdx", int(i), int(j), float(C[i, j])))

    metzler = not any(v[0] == "dfdx" for v in violations)
    input_ok = not any(v[0] == "dfdv" for v in violations)
    output_ok = not any(v[0] == "dhdx" for v in violations)

    if metzler and input_ok and output_ok:
        verdict = Verdict.INPUT_STATE_OUTPUT_MONOTONE
    elif not metzler and np.all(A[off_mask] <= eps):
        verdict = Verdict.COMPETITIVE
    elif input_ok and output_ok:
        verdict = Verdict.INPUT_OUTPUT_ONLY
    else:
        verdict = Verdict.INDETERMINATE

    return MonotoneVerdict(
        is_metzler_state=metzler,
        input_nonneg=input_ok,
        output_nonneg=output_ok,
        verdict=verdict,
        violating_entries=violations,
    )


@dataclass(frozen=True)
class RegimeReport:
    """降阶系统分类"""

    regime: Regime
    weakly_coupled: bool            # 所有 |非对角| < threshold·min|对角|
    max_offdiag_ratio: float

    def to_dict(self) -> Dict[str, Any]:
        return {
            "regime": self.regime.value,
            "weakly_coupled": self.weakly_coupled,
            "max_offdiag_ratio": self.max_offdiag_ratio,
        }


def classify_regime(J_reduced, threshold: float = 0.1, eps_rel: float = 1e-9) -> RegimeReport:
    """
    合作 / 竞争 / 混合分类

    cooperative：全部非对角 ≥ −eps；competitive：全部 ≤ eps 且存在负元；其余 mixed。
    eps = eps_rel·max|J|。

    Raises:
        InvalidParameterError: 非方阵
    """
    J = np.asarray(J_reduced, dtype=float)
    if J.ndim != 2 or J.shape[0] != J.shape[1]:
        raise InvalidParameterError(f"J_reduced 必须为方阵，当前 {J.shape}")
    p = J.shape[0]
    off = J[~np.eye(p, dtype=bool)]
    eps = eps_rel * float(np.max(np.abs(J))) if J.size else 0.0

    if off.size == 0 or np.all(off >= -eps):
        regime = Regime.COOPERATIVE
    elif np.all(off <= eps):
        regime = Regime.COMPETITIVE
    else:
        regime = Regime.MIXED

    diag_min = float(np.min(np.abs(np.diag(J)))) if p else 0.0
    off_max = float(np.max(np.abs(off))) if off.size else 0.0
    ratio = off_max / diag_min if diag_min > 0 else (0.0 if off_max == 0 else np.inf)
    return RegimeReport(regime=regime, weakly_coupled=bool(ratio < threshold), max_offdiag_ratio=float(ratio))
