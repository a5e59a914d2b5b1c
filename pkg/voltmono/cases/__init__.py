# coding=utf-8
"""
算例模块 - 算例文件解析、序列化与内置算例
"""

from voltmono.cases.parser import (
    CASE_FORMAT,
    BranchRecord,
    BusRecord,
    CaseFile,
    DeviceRecord,
    EventRecord,
    LoadRecord,
    PowerFlowSpec,
    ScenarioRecord,
    SystemInfo,
    build_system,
    bundled_cases,
    case_hash,
    load_bundled,
    parse_case,
    parse_case_text,
    resolve_case,
    scenario_names,
    serialize_case,
)

__all__ = [
    "CASE_FORMAT",
    "BranchRecord",
    "BusRecord",
    "CaseFile",
    "DeviceRecord",
    "EventRecord",
    "LoadRecord",
    "PowerFlowSpec",
    "ScenarioRecord",
    "SystemInfo",
    "build_system",
    "bundled_cases",
    "case_hash",
    "load_bundled",
    "parse_case",
    "parse_case_text",
    "resolve_case",
    "scenario_names",
    "serialize_case",
]
