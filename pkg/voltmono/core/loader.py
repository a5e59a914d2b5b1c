# coding=utf-8
"""
配置加载模块

负责从 YAML 配置文件和环境变量加载配置。
"""

import os
from pathlib import Path
from typing import Any, Dict, Optional

import yaml


def _get_env_bool(key: str) -> Optional[bool]:
    """从环境变量获取布尔值，如果未设置返回 None"""
    value = os.environ.get(key, "").strip().lower()
    if not value:
        return None
    return value in ("true", "1")


def _get_env_int(key: str, default: int = 0) -> int:
    """从环境变量获取整数值"""
    value = os.environ.get(key, "").strip()
    if not value:
        return default
    try:
        return int(value)
    except ValueError:
        return default


def _get_env_float(key: str) -> Optional[float]:
    """从环境变量获取浮点值，未设置或非法时返回 None"""
    value = os.environ.get(key, "").strip()
    if not value:
        return None
    try:
        return float(value)
    except ValueError:
        return None


def _get_env_str(key: str, default: str = "") -> str:
    """从环境变量获取字符串值"""
    return os.environ.get(key, "").strip() or default


def _load_app_config(config_data: Dict) -> Dict:
    """加载应用配置"""
    app_config = config_data.get("app", {}) or {}
    debug_env = _get_env_bool("VOLTMONO_DEBUG")
    quiet_env = _get_env_bool("VOLTMONO_QUIET")
    return {
        "DEBUG": debug_env if debug_env is not None else app_config.get("debug", False),
        "QUIET": quiet_env if quiet_env is not None else app_config.get("quiet", False),
    }


def _load_network_config(config_data: Dict) -> Dict:
    """加载网络求解配置"""
    network = config_data.get("network", {}) or {}
    return {
        "NEWTON_TOL": float(network.get("newton_tol", 1e-10)),
        "MAX_ITERATIONS": int(network.get("max_iterations", 50)),
        "V_FLOOR": float(network.get("v_floor", 1e-6)),
        "FAULT_ADMITTANCE": complex(network.get("fault_admittance", "-10000j")),
        "LOAD_BREAK_VOLTAGE": float(network.get("load_break_voltage", 0.7)),
        "BASE_MVA": float(network.get("base_mva", 100.0)),
        "FREQUENCY_HZ": float(network.get("frequency_hz", 60.0)),
    }


def _load_simulation_config(config_data: Dict) -> Dict:
    """加载时域仿真配置"""
    simulation = config_data.get("simulation", {}) or {}

    # 环境变量覆盖
    dt_env = _get_env_float("VOLTMONO_DT")
    stride_env = _get_env_int("VOLTMONO_JACOBIAN_STRIDE")

    return {
        "DT": dt_env if dt_env is not None else float(simulation.get("dt", 1e-3)),
        "JACOBIAN_STRIDE": stride_env or int(simulation.get("jacobian_stride", 10)),
        "EQUILIBRIUM_TOL": float(simulation.get("equilibrium_tol", 1e-8)),
    }


def _load_analysis_config(config_data: Dict) -> Dict:
    """加载单调性分析配置"""
    analysis = config_data.get("analysis", {}) or {}
    return {
        "EPS_REL": float(analysis.get("eps_rel", 1e-6)),
        "OFFDIAG_THRESHOLD": float(analysis.get("offdiag_threshold", 0.1)),
        "SIGMA_STEPS": int(analysis.get("sigma_steps", 20)),
        "SHED_FD_STEP": float(analysis.get("shed_fd_step", 1e-4)),
        "ORDERING_TOL": float(analysis.get("ordering_tol", 1e-6)),
    }


def _load_output_config(config_data: Dict) -> Dict:
    """加载结果输出配置"""
    output = config_data.get("output", {}) or {}
    return {
        "DIR": _get_env_str("VOLTMONO_OUTPUT_DIR") or output.get("dir", "output"),
        "EMIT_PLOTS": output.get("emit_plots", True),
    }


def build_config(config_data: Optional[Dict] = None) -> Dict[str, Any]:
    """
    由原始 YAML 数据构建配置字典

    Args:
        config_data: yaml.safe_load 的结果，None 表示全部使用默认值

    Returns:
        合并后的配置字典
    """
    config_data = config_data or {}
    config: Dict[str, Any] = {}
    config.update(_load_app_config(config_data))
    config["NETWORK"] = _load_network_config(config_data)
    config["SIMULATION"] = _load_simulation_config(config_data)
    config["ANALYSIS"] = _load_analysis_config(config_data)
    config["OUTPUT"] = _load_output_config(config_data)
    return config


def load_config(config_path: Optional[str] = None) -> Dict[str, Any]:
    """
    加载配置文件

    Args:
        config_path: 配置文件路径，默认从环境变量 CONFIG_PATH 获取或使用 config/config.yaml

    Returns:
        包含所有配置的字典

    Raises:
        FileNotFoundError: 配置文件不存在
    """
    if config_path is None:
        config_path = os.environ.get("CONFIG_PATH", "config/config.yaml")

    if not Path(config_path).exists():
        raise FileNotFoundError(f"配置文件 {config_path} 不存在")

    with open(config_path, "r", encoding="utf-8") as f:
        config_data = yaml.safe_load(f)

    config = build_config(config_data)
    if not config["QUIET"]:
        print(f"[配置] 配置文件加载成功: {config_path}")
    return config


def load_config_or_default(config_path: Optional[str] = None) -> Dict[str, Any]:
    """显式路径必须存在；未指定且默认文件缺失时回退到内置默认值"""
    if config_path is not None:
        return load_config(config_path)
    try:
        return load_config(None)
    except FileNotFoundError:
        return build_config(None)


DEFAULT_CONFIG: Dict[str, Any] = build_config(None)
