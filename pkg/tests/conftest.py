# coding=utf-8
"""
测试公共夹具

内置算例与平衡点按会话缓存；39 母线算例较慢，相关用例标记为 slow。
"""

import numpy as np
import pytest

from voltmono.cases import load_bundled
from voltmono.core.loader import DEFAULT_CONFIG
from voltmono.simulation import init_equilibrium, run_linear_demo


@pytest.fixture(scope="session")
def config():
    return DEFAULT_CONFIG


@pytest.fixture(scope="session")
def smib_case():
    return load_bundled("smib")


@pytest.fixture(scope="session")
def case39_sg():
    return load_bundled("case39_sg")


@pytest.fixture(scope="session")
def case39_gfm():
    return load_bundled("case39_gfm")


@pytest.fixture(scope="session")
def smib_eq(smib_case, config):
    return init_equilibrium(smib_case, config)


@pytest.fixture(scope="session")
def linear_demo():
    """输入幅值 1 与 2 的两组响应"""
    return run_linear_demo(1.0), run_linear_demo(2.0)


def wirtinger_fd(func, V: complex, h: float = 1e-7):
    """
    复变量函数的 Wirtinger 偏导差分

    Returns:
        (∂f/∂V, ∂f/∂V̄)
    """
    d_re = (np.asarray(func(V + h)) - np.asarray(func(V - h))) / (2 * h)
    d_im = (np.asarray(func(V + 1j * h)) - np.asarray(func(V - 1j * h))) / (2 * h)
    d_V, d_Vbar = 0.5 * (d_re - 1j * d_im), 0.5 * (d_re + 1j * d_im)
    if d_V.ndim == 0:
        return complex(d_V), complex(d_Vbar)
    return d_V, d_Vbar


def state_fd(func, x: np.ndarray, h: float = 1e-7) -> np.ndarray:
    """对实状态向量的中心差分，列 j 为 ∂f/∂x_j"""
    x = np.asarray(x, dtype=float)
    cols = []
    for j in range(len(x)):
        e = np.zeros_like(x)
        e[j] = h
        cols.append((np.asarray(func(x + e)) - np.asarray(func(x - e))) / (2 * h))
    return np.column_stack(cols)
