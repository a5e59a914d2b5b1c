# coding=utf-8
"""结果输出：CSV、报告渲染、绘图脚本与原子发布"""

import json

import numpy as np
import pytest

from voltmono.report import (
    format_value,
    render_report,
    run_metadata,
    sign_script,
    timeseries_csv,
    to_json,
    upsilon_script,
    write_results,
)
from voltmono.simulation import TimeSeriesBuilder
from voltmono.utils.errors import InvalidParameterError


def files_of(directory):
    return {p.name: p.read_bytes() for p in sorted(directory.iterdir())}


class TestCsv:
    def test_empty_series_has_header_only(self):
        series = TimeSeriesBuilder(("a", "b"), name="empty").build()
        assert timeseries_csv(series) == "t,a,b\n"

    def test_selected_signals(self, linear_demo):
        lo, _ = linear_demo
        lines = timeseries_csv(lo, ["y"]).splitlines()
        assert lines[0] == "t,y"
        assert len(lines) == len(lo.times) + 1
        assert lines[1] == "0.0,0.0"

    def test_unknown_signal(self, linear_demo):
        with pytest.raises(InvalidParameterError):
            timeseries_csv(linear_demo[0], ["vm@1"])


class TestFormatter:
    def test_format_value(self):
        assert format_value(1.0 / 3.0) == "0.333333"
        assert format_value(True) == "是"
        assert format_value(None) == "-"
        assert format_value(1 - 2j) == "1-2j"

    def test_render_report(self):
        text = render_report("demo", {
            "margin": 1.5,
            "certified": True,
            "nested": {"b": 2},
            "values": list(range(20)),
            "matrix": [[1, 2], [3, 4]],
            "labels": ["eq@1", "efd@1"],
            "signs": [["-", "+"], ["-", "-"]],
        })
        assert text.startswith("== demo ==\n")
        assert "margin: 1.5" in text
        assert "certified: 是" in text
        assert "nested:\n  b: 2" in text
        assert "(20 项)" in text
        assert "matrix: 矩阵 2×2" in text
        assert "符号矩阵:" in text
        assert "efd@1  - -" in text
        assert text.endswith("\n")

    def test_json_is_stable(self):
        report = {"z": 1 + 2j, "a": np.arange(3), "f": np.float64(0.5)}
        text = to_json(report)
        assert json.loads(text) == {"a": [0, 1, 2], "f": 0.5, "z": "(1+2j)"}
        assert text == to_json(dict(reversed(list(report.items()))))

    def test_plot_scripts_compile(self):
        compile(sign_script("signpattern.json"), "plot_signpattern.py", "exec")
        compile(upsilon_script("upsilon.json"), "plot_upsilon.py", "exec")


class TestWriteResults:
    def test_bundle_contents(self, linear_demo, tmp_path):
        target = tmp_path / "demo"
        bundle = write_results(target, list(linear_demo), {"linear_demo": {"holds": True}})
        names = set(files_of(target))
        assert {"linear_x1.csv", "linear_x2.csv", "linear_demo.json", "linear_demo.txt",
                "metadata.json", "plot_timeseries.py"} <= names
        assert bundle.csv_paths["linear_x1"] == target / "linear_x1.csv"
        header = (target / "linear_x1.csv").read_text(encoding="utf-8").splitlines()[0]
        assert header == "t,x1,x2,x3,y"
        compile((target / "plot_timeseries.py").read_text(encoding="utf-8"), "plot", "exec")

    def test_rerun_is_byte_identical(self, linear_demo, tmp_path):
        meta = run_metadata(case_hash="abc", config={"QUIET": True})
        write_results(tmp_path / "a", list(linear_demo), {"r": {"x": 1.0}}, metadata=meta)
        write_results(tmp_path / "b", list(linear_demo), {"r": {"x": 1.0}}, metadata=meta)
        assert files_of(tmp_path / "a") == files_of(tmp_path / "b")

    def test_overwrite_existing(self, linear_demo, tmp_path):
        target = tmp_path / "out"
        write_results(target, [linear_demo[0]], {"first": {"n": 1}})
        write_results(target, [linear_demo[1]], {"second": {"n": 2}}, emit_plots=False)
        names = set(files_of(target))
        assert "second.json" in names and "first.json" not in names
        assert "plot_timeseries.py" not in names
        assert [p.name for p in tmp_path.iterdir()] == ["out"]

    def test_failure_leaves_nothing(self, linear_demo, tmp_path):
        target = tmp_path / "broken"
        with pytest.raises(InvalidParameterError):
            write_results(target, [linear_demo[0]], signals={"linear_x1": ["vm@1"]})
        assert not target.exists()
        assert list(tmp_path.iterdir()) == []

    def test_failure_keeps_previous_bundle(self, linear_demo, tmp_path):
        target = tmp_path / "keep"
        write_results(target, [linear_demo[0]])
        before = files_of(target)
        with pytest.raises(InvalidParameterError):
            write_results(target, [linear_demo[0]], signals={"linear_x1": ["vm@1"]})
        assert files_of(target) == before

    def test_metadata_has_versions_without_timestamps(self):
        meta = run_metadata(case_hash="abc", config={"DEBUG": False})
        assert meta["case_sha256"] == "abc"
        assert set(meta["versions"]) == {"voltmono", "numpy", "scipy"}
        assert not any("time" in key for key in meta)
