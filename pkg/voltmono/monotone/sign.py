# coding=utf-8
"""
符号模式模块

雅可比逐元素符号分类，以及电压子系统的符号模板与匹配率统计。
"""

from dataclasses import dataclass
from typing import Any, Dict, List, Optional, Sequence

import numpy as np

from voltmono.utils.errors import InvalidParameterError

SIGN_CHARS = {1: "+", -1: "-", 0: "0"}


@dataclass(frozen=True, eq=False)
class SignMatrix:
    """符号矩阵：+1 / −1 / 0"""

    signs: np.ndarray
    eps_abs: float
    source_time: Optional[float] = None

    def to_strings(self) -> List[List[str]]:
        return [[SIGN_CHARS[int(v)] for v in row] for row in self.signs]

    def __eq__(self, other) -> bool:
        return isinstance(other, SignMatrix) and np.array_equal(self.signs, other.signs)

    __hash__ = None

    def to_dict(self) -> Dict[str, Any]:
        return {
            "eps_abs": self.eps_abs,
            "source_time": self.source_time,
            "signs": ["".join(row) for row in self.to_strings()],
        }


def sign_pattern(matrix: np.ndarray, eps_rel: float = 1e-6, source_time: Optional[float] = None) -> SignMatrix:
    """
    逐元素符号分类

    eps_abs = eps_rel·max|entry|；entry > eps_abs 为 +，< −eps_abs 为 −，否则为 0。

    Examples:
        diag(−1, −1) → [[−, 0], [0, −]]
    """
    if not 0 < eps_rel < 1:
        raise InvalidParameterError(f"eps_rel 必须在 (0, 1) 内，当前 {eps_rel}")
    M = np.asarray(matrix, dtype=float)
    if not np.all(np.isfinite(M)):
        raise InvalidParameterError("矩阵含非有限值")
    eps_abs = eps_rel * float(np.max(np.abs(M))) if M.size else 0.0
    signs = np.zeros(M.shape, dtype=np.int8)
    signs[M > eps_abs] = 1
    signs[M < -eps_abs] = -1
    return SignMatrix(signs=signs, eps_abs=eps_abs, source_time=source_time)


def voltage_template(p: int) -> np.ndarray:
    """
    电压子系统 [ℰ; ℰ_fd] 的符号模板（2p × 2p）

        ∂ℰ̇/∂ℰ      对角 −，非对角 +
        ∂ℰ̇/∂ℰ_fd   对角 +，非对角 0
        ∂ℰ̇_fd/∂ℰ   全部 −
        ∂ℰ̇_fd/∂ℰ_fd 对角 −，非对角 0
    """
    eye = np.eye(p, dtype=np.int8)
    ee = np.ones((p, p), dtype=np.int8) - 2 * eye
    ef = eye.copy()
    fe = -np.ones((p, p), dtype=np.int8)
    ff = -eye
    return np.block([[ee, ef], [fe, ff]])


def template_matches(signs: np.ndarray, template: np.ndarray) -> bool:
    """
    模板匹配：+ 位置不得为 −，− 位置不得为 +，0 位置必须为 0
    """
    signs = np.asarray(signs)
    plus = template == 1
    minus = template == -1
    zero = template == 0
    return bool(
        np.all(signs[plus] >= 0)
        and np.all(signs[minus] <= 0)
        and np.all(signs[zero] == 0)
    )


def template_mismatches(signs: np.ndarray, template: np.ndarray) -> List[tuple]:
    """列出与模板冲突的位置"""
    out = []
    for i, j in zip(*np.nonzero(np.asarray(signs) * template < 0)):
        out.append((int(i), int(j)))
    for i, j in zip(*np.nonzero((template == 0) & (np.asarray(signs) != 0))):
        out.append((int(i), int(j)))
    return sorted(out)


def template_match_fraction(
    matrices: Sequence[np.ndarray],
    index: Sequence[int],
    eps_rel: float = 1e-6,
    template: Optional[np.ndarray] = None,
) -> float:
    """
    一组雅可比快照中满足电压子系统模板的比例

    Args:
        matrices: 全阶雅可比序列
        index: 电压子系统在状态向量中的位置 [ℰ..., ℰ_fd...]
        eps_rel: 符号判定相对阈值
        template: 自定义模板，默认 voltage_template
    """
    index = list(index)
    if template is None:
        template = voltage_template(len(index) // 2)
    if not matrices:
        return 1.0
    hits = 0
    for J in matrices:
        sub = np.asarray(J)[np.ix_(index, index)]
        if template_matches(sign_pattern(sub, eps_rel).signs, template):
            hits += 1
    return hits / len(matrices)
