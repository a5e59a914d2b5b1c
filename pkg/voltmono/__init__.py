# coding=utf-8
"""
voltmono - 含同步机与构网型变流器的电力系统电压动态仿真与单调性分析工具

使用方式:
  python -m voltmono <command>   # 模块执行
  voltmono <command>             # 安装后执行
"""

__version__ = "1.0.0"

from voltmono.context import AppContext  # noqa: E402

__all__ = ["AppContext", "__version__"]
