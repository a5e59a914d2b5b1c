# coding=utf-8
"""
结果输出模块

模块结构：
- formatter: 报告文本渲染与稳定 JSON
- plots: 绘图脚本生成
- generator: 结果目录写出（临时目录 + 原子发布）
"""

from voltmono.report.formatter import format_value, render_report, render_sign_rows, to_json
from voltmono.report.plots import sign_script, timeseries_script, upsilon_script
from voltmono.report.generator import ResultBundle, run_metadata, timeseries_csv, write_results

__all__ = [
    # 格式化
    "format_value",
    "render_report",
    "render_sign_rows",
    "to_json",
    # 绘图脚本
    "sign_script",
    "timeseries_script",
    "upsilon_script",
    # 结果目录
    "ResultBundle",
    "run_metadata",
    "timeseries_csv",
    "write_results",
]
