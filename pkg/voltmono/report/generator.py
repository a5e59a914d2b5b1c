# coding=utf-8
"""
结果目录生成模块

write_results 先把全部文件写入同级的临时目录，成功后用 os.replace 一次性发布；
任何一步失败都会清理临时目录，目标目录保持原样。

目录结构：
    <bundle_dir>/
        <序列名>.csv          表头 t,<信号...>
        <报告名>.json / .txt   结构化报告与文本渲染
        metadata.json         算例哈希、配置快照、版本号（不含时间戳）
        plot_*.py             绘图脚本
"""

import os
import shutil
import tempfile
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Dict, Mapping, Optional, Sequence, Union

import numpy as np
import scipy

from voltmono.report.formatter import render_report, to_json
from voltmono.report.plots import sign_script, timeseries_script, upsilon_script
from voltmono.simulation.timeseries import TimeSeries


@dataclass
class ResultBundle:
    """已发布的结果目录"""

    directory: Path
    csv_paths: Dict[str, Path] = field(default_factory=dict)
    report_paths: Dict[str, Path] = field(default_factory=dict)
    script_paths: Dict[str, Path] = field(default_factory=dict)
    metadata: Dict[str, Any] = field(default_factory=dict)

    def all_paths(self):
        yield from self.csv_paths.values()
        yield from self.report_paths.values()
        yield from self.script_paths.values()
        yield self.directory / "metadata.json"

    def to_dict(self) -> Dict[str, Any]:
        return {
            "directory": str(self.directory),
            "csv": {k: v.name for k, v in self.csv_paths.items()},
            "reports": {k: v.name for k, v in self.report_paths.items()},
            "scripts": {k: v.name for k, v in self.script_paths.items()},
        }


def timeseries_csv(series: TimeSeries, signals: Optional[Sequence[str]] = None) -> str:
    """
    时间序列 → CSV 文本

    Args:
        series: 时间序列
        signals: 输出信号，None 表示全部

    Returns:
        CSV 文本；空序列只有表头
    """
    if signals is None:
        signals = series.signal_names()
    data = series.columns(signals)
    lines = [",".join(["t", *signals])]
    for row in data:
        lines.append(",".join(repr(float(v)) for v in row))
    return "\n".join(lines) + "\n"


def run_metadata(
    case_hash: Optional[str] = None,
    config: Optional[Mapping[str, Any]] = None,
    extra: Optional[Mapping[str, Any]] = None,
) -> Dict[str, Any]:
    """运行元数据：算例哈希、配置快照与版本号"""
    from voltmono import __version__

    meta: Dict[str, Any] = {
        "case_sha256": case_hash,
        "config": dict(config or {}),
        "versions": {
            "voltmono": __version__,
            "numpy": np.__version__,
            "scipy": scipy.__version__,
        },
    }
    if extra:
        meta.update(extra)
    return meta


def _write(path: Path, text: str) -> Path:
    with open(path, "w", encoding="utf-8", newline="\n") as f:
        f.write(text)
    return path


def _publish(staging: Path, target: Path) -> None:
    """用 os.replace 发布；目标已存在时先挪开旧目录"""
    if not target.exists():
        os.replace(staging, target)
        return
    old = Path(tempfile.mkdtemp(prefix=f".{target.name}.old-", dir=target.parent))
    old.rmdir()
    os.replace(target, old)
    try:
        os.replace(staging, target)
    except OSError:
        os.replace(old, target)
        raise
    shutil.rmtree(old, ignore_errors=True)


def write_results(
    bundle_dir: Union[str, Path],
    timeseries: Union[Sequence[TimeSeries], Mapping[str, TimeSeries]] = (),
    reports: Optional[Mapping[str, Any]] = None,
    signals: Optional[Mapping[str, Sequence[str]]] = None,
    metadata: Optional[Mapping[str, Any]] = None,
    emit_plots: bool = True,
    quiet: bool = True,
) -> ResultBundle:
    """
    写出结果目录

    Args:
        bundle_dir: 目标目录
        timeseries: 时间序列列表（以 name 命名文件）或 名称→序列 映射
        reports: 报告名 → dict
        signals: 序列名 → 输出信号（缺省输出全部信号）
        metadata: 运行元数据，见 run_metadata
        emit_plots: 是否生成绘图脚本
        quiet: 是否静默

    Returns:
        ResultBundle

    Raises:
        OSError: 写入或发布失败（目标目录保持原样）
    """
    target = Path(bundle_dir)
    target.parent.mkdir(parents=True, exist_ok=True)
    if isinstance(timeseries, Mapping):
        named = dict(timeseries)
    else:
        named = {ts.name or f"series{i}": ts for i, ts in enumerate(timeseries)}
    reports = dict(reports or {})
    signals = dict(signals or {})

    staging = Path(tempfile.mkdtemp(prefix=f".{target.name}.staging-", dir=target.parent))
    bundle = ResultBundle(directory=target, metadata=dict(metadata or {}))
    try:
        for name, series in named.items():
            text = timeseries_csv(series, signals.get(name))
            bundle.csv_paths[name] = _write(staging / f"{name}.csv", text)

        for name, report in reports.items():
            payload = report.to_dict() if hasattr(report, "to_dict") else report
            bundle.report_paths[name] = _write(staging / f"{name}.json", to_json(payload))
            _write(staging / f"{name}.txt", render_report(name, payload))

        if emit_plots:
            if bundle.csv_paths:
                csv_names = [p.name for p in bundle.csv_paths.values()]
                bundle.script_paths["timeseries"] = _write(staging / "plot_timeseries.py", timeseries_script(csv_names))
            for name in reports:
                payload = bundle.report_paths[name]
                if name.startswith("signpattern"):
                    bundle.script_paths[name] = _write(staging / f"plot_{name}.py", sign_script(payload.name))
                elif name.startswith("upsilon"):
                    bundle.script_paths[name] = _write(staging / f"plot_{name}.py", upsilon_script(payload.name))

        _write(staging / "metadata.json", to_json(bundle.metadata))
        _publish(staging, target)
    except BaseException:
        shutil.rmtree(staging, ignore_errors=True)
        raise

    # 发布后改为最终路径
    bundle.csv_paths = {k: target / v.name for k, v in bundle.csv_paths.items()}
    bundle.report_paths = {k: target / v.name for k, v in bundle.report_paths.items()}
    bundle.script_paths = {k: target / v.name for k, v in bundle.script_paths.items()}

    if not quiet:
        print(f"[输出] 结果已写入 {target}（{len(bundle.csv_paths)} 个 CSV，{len(bundle.report_paths)} 份报告）")
    return bundle
