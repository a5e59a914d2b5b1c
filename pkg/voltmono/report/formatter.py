# coding=utf-8
"""
文本报告格式化模块

把结构化报告（dict）渲染成便于阅读的纯文本，与 JSON 报告并列写出。
"""

import json
from typing import Any, Dict, List, Sequence

import numpy as np

# 列表超过此长度时只显示首尾
LIST_PREVIEW = 8


def format_value(value: Any) -> str:
    """标量格式化：浮点统一用 6 位有效数字"""
    if isinstance(value, (bool, np.bool_)):
        return "是" if value else "否"
    if isinstance(value, (float, np.floating)):
        return f"{float(value):.6g}"
    if isinstance(value, complex):
        return f"{value.real:.6g}{value.imag:+.6g}j"
    if value is None:
        return "-"
    return str(value)


def _format_list(values: Sequence[Any]) -> str:
    if len(values) > LIST_PREVIEW:
        head = ", ".join(format_value(v) for v in values[:3])
        tail = ", ".join(format_value(v) for v in values[-2:])
        return f"[{head}, ..., {tail}] ({len(values)} 项)"
    return "[" + ", ".join(format_value(v) for v in values) + "]"


def _render(lines: List[str], key: str, value: Any, indent: int) -> None:
    pad = "  " * indent
    if isinstance(value, dict):
        lines.append(f"{pad}{key}:")
        for k in sorted(value):
            _render(lines, str(k), value[k], indent + 1)
    elif isinstance(value, (list, tuple)) and value and isinstance(value[0], dict):
        lines.append(f"{pad}{key}: ({len(value)} 项)")
        for i, item in enumerate(value[:LIST_PREVIEW]):
            _render(lines, f"[{i}]", item, indent + 1)
        if len(value) > LIST_PREVIEW:
            lines.append(f"{pad}  ...")
    elif isinstance(value, (list, tuple)) and value and isinstance(value[0], (list, tuple)):
        lines.append(f"{pad}{key}: 矩阵 {len(value)}×{len(value[0])}")
    elif isinstance(value, (list, tuple)):
        lines.append(f"{pad}{key}: {_format_list(value)}")
    else:
        lines.append(f"{pad}{key}: {format_value(value)}")


def render_sign_rows(rows: Sequence[str], labels: Sequence[str] = ()) -> List[str]:
    """符号矩阵的行渲染，labels 给出时左侧对齐显示"""
    if not labels:
        return [" ".join(row) for row in rows]
    width = max(len(label) for label in labels)
    return [f"{label:>{width}}  {' '.join(row)}" for label, row in zip(labels, rows)]


def render_report(name: str, report: Dict[str, Any]) -> str:
    """
    通用报告渲染

    嵌套 dict 缩进显示，长列表截断，二维列表只显示形状；
    含 signs 字段（符号矩阵）时额外画出矩阵。

    Args:
        name: 报告名称（作为标题）
        report: 报告内容

    Returns:
        文本（以换行结尾）
    """
    lines = [f"== {name} ==", ""]
    for key in sorted(report):
        if key == "signs":
            continue
        _render(lines, key, report[key], 0)
    signs = report.get("signs")
    if signs:
        lines.append("")
        lines.append("符号矩阵:")
        lines.extend("  " + row for row in render_sign_rows(signs, report.get("labels", ())))
    return "\n".join(lines) + "\n"


def to_json(report: Any) -> str:
    """稳定的 JSON 文本（键排序，保留中文）"""
    return json.dumps(report, indent=2, sort_keys=True, ensure_ascii=False, default=json_default) + "\n"


def json_default(obj: Any) -> Any:
    """numpy / 复数 / 枚举等对象的 JSON 转换"""
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    if isinstance(obj, np.generic):
        return obj.item()
    if isinstance(obj, complex):
        return str(obj)
    if hasattr(obj, "to_dict"):
        return obj.to_dict()
    if hasattr(obj, "value"):
        return obj.value
    return str(obj)
