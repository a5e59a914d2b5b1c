# coding=utf-8
"""
Gershgorin 圆盘稳定性证书
"""

from dataclasses import dataclass
from typing import Any, Dict, List, Tuple

import numpy as np
import scipy.linalg

from voltmono.utils.errors import InvalidParameterError


@dataclass(frozen=True)
class GershgorinCertificate:
    """圆盘证书与特征值交叉校验"""

    certified_stable: bool
    discs: List[Tuple[float, float]]    # (圆心 J_ii, 半径 Σ_{j≠i}|J_ij|)
    spectral_abscissa: float

    @property
    def margin(self) -> float:
        """最靠右圆盘右端点的相反数"""
        return -max(c + r for c, r in self.discs) if self.discs else np.inf

    def to_dict(self) -> Dict[str, Any]:
        return {
            "certified_stable": self.certified_stable,
            "spectral_abscissa": self.spectral_abscissa,
            "margin": self.margin,
            "discs": [list(d) for d in self.discs],
        }


def gershgorin_certificate(J_reduced) -> GershgorinCertificate:
    """
    所有行圆盘均落在左半平面时给出稳定证书

    Raises:
        InvalidParameterError: 非方阵或含非有限值
    """
    J = np.asarray(J_reduced, dtype=float)
    if J.ndim != 2 or J.shape[0] != J.shape[1]:
        raise InvalidParameterError(f"J 必须为方阵，当前 {J.shape}")
    if not np.all(np.isfinite(J)):
        raise InvalidParameterError("J 含非有限值")

    centers = np.diag(J)
    radii = np.abs(J).sum(axis=1) - np.abs(centers)
    discs = [(float(c), float(r)) for c, r in zip(centers, radii)]
    certified = bool(np.all(centers + radii < 0))

    eigenvalues = scipy.linalg.eigvals(J) if J.size else np.array([])
    abscissa = float(np.max(eigenvalues.real)) if eigenvalues.size else -np.inf
    return GershgorinCertificate(certified_stable=certified, discs=discs, spectral_abscissa=abscissa)
