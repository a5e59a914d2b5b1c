# coding=utf-8
"""
绘图脚本生成模块

只生成独立的 Python 脚本文本，脚本在运行时才导入 matplotlib，
按相对路径读取同一结果目录下的 CSV / JSON 文件。
"""

from typing import Sequence

_HEADER = '''# coding=utf-8
"""由 voltmono 生成的绘图脚本：{title}"""

import csv
import json
from pathlib import Path

import matplotlib.pyplot as plt

HERE = Path(__file__).resolve().parent
'''


def timeseries_script(csv_names: Sequence[str]) -> str:
    """时间序列图：每个 CSV 一张图，首列为时间"""
    files = ", ".join(repr(n) for n in csv_names)
    return _HEADER.format(title="时间序列") + f'''
FILES = [{files}]


def load(name):
    with open(HERE / name, encoding="utf-8") as f:
        rows = list(csv.reader(f))
    header, data = rows[0], rows[1:]
    columns = list(zip(*data)) if data else [[] for _ in header]
    return header, [[float(v) for v in col] for col in columns]


def main():
    for name in FILES:
        header, columns = load(name)
        fig, ax = plt.subplots(figsize=(8, 4))
        for label, col in zip(header[1:], columns[1:]):
            ax.plot(columns[0], col, label=label)
        ax.set_xlabel("t (s)")
        ax.set_title(name)
        if len(header) <= 12:
            ax.legend(fontsize="small")
        fig.tight_layout()
        fig.savefig(HERE / (Path(name).stem + ".png"), dpi=150)
        plt.close(fig)


if __name__ == "__main__":
    main()
'''


def sign_script(report_name: str) -> str:
    """符号模式匹配率随时间变化图，读取报告中的 timeline 字段"""
    return _HEADER.format(title="符号模式-时间") + f'''
REPORT = {report_name!r}


def main():
    with open(HERE / REPORT, encoding="utf-8") as f:
        report = json.load(f)
    timeline = report.get("timeline", [])
    t = [p["t"] for p in timeline]
    ok = [1.0 if p["matches"] else 0.0 for p in timeline]
    fig, ax = plt.subplots(figsize=(8, 3))
    ax.step(t, ok, where="post")
    ax.set_ylim(-0.1, 1.1)
    ax.set_yticks([0, 1])
    ax.set_yticklabels(["不匹配", "匹配"])
    ax.set_xlabel("t (s)")
    ax.set_title("match fraction = {{:.3f}}".format(report.get("match_fraction", 0.0)))
    fig.tight_layout()
    fig.savefig(HERE / "sign_timeline.png", dpi=150)
    plt.close(fig)


if __name__ == "__main__":
    main()
'''


def upsilon_script(report_name: str) -> str:
    """Υ′-σ 曲线：每个采样时刻、每条输出母线一条线"""
    return _HEADER.format(title="Upsilon-sigma") + f'''
REPORT = {report_name!r}


def main():
    with open(HERE / REPORT, encoding="utf-8") as f:
        report = json.load(f)
    sigma = report["sigma"]
    fig, ax = plt.subplots(figsize=(8, 4))
    for t, per_bus in zip(report["times"], report["upsilon_prime"]):
        for bus, values in zip(report["output_buses"], per_bus):
            ax.plot(sigma, values, label="t={{:g}} bus {{}}".format(t, bus))
    ax.axhline(0.0, color="k", linewidth=0.5)
    ax.set_xlabel("sigma")
    ax.set_ylabel("Upsilon'")
    ax.legend(fontsize="small")
    fig.tight_layout()
    fig.savefig(HERE / "upsilon.png", dpi=150)
    plt.close(fig)


if __name__ == "__main__":
    main()
'''
