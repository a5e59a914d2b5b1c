# coding=utf-8
"""
核心模块 - 配置加载与系统模型
"""

from voltmono.core.loader import DEFAULT_CONFIG, build_config, load_config, load_config_or_default
from voltmono.core.system import PowerSystem, StateLayout

__all__ = [
    "DEFAULT_CONFIG",
    "build_config",
    "load_config",
    "load_config_or_default",
    "PowerSystem",
    "StateLayout",
]
