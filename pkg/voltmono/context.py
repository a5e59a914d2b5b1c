# coding=utf-8
"""
应用上下文模块

封装配置字典，提供统一的配置访问与常用流程（加载算例、初始化平衡点、
构造场景、写出结果），命令行与测试都通过它调用各模块。
"""

from pathlib import Path
from typing import Any, Dict, Mapping, Optional, Sequence

from voltmono.cases import CaseFile, case_hash, resolve_case
from voltmono.core.loader import DEFAULT_CONFIG
from voltmono.report import ResultBundle, run_metadata, write_results
from voltmono.simulation import Equilibrium, Scenario, TimeSeries, init_equilibrium, run, scenario_from_case


class AppContext:
    """
    应用上下文类

    使用示例:
        ctx = AppContext(load_config_or_default())
        case = ctx.load_case("case39_gfm")
        eq = ctx.equilibrium(case)
        series = ctx.run(ctx.scenario(case, "vref_step"), eq)
    """

    def __init__(self, config: Optional[Dict[str, Any]] = None):
        self.config = config if config is not None else DEFAULT_CONFIG
        self._equilibria: Dict[str, Equilibrium] = {}

    # === 配置访问 ===

    @property
    def quiet(self) -> bool:
        return bool(self.config.get("QUIET", False))

    @property
    def debug(self) -> bool:
        return bool(self.config.get("DEBUG", False))

    @property
    def network_config(self) -> Dict[str, Any]:
        return self.config.get("NETWORK", {})

    @property
    def simulation_config(self) -> Dict[str, Any]:
        return self.config.get("SIMULATION", {})

    @property
    def analysis_config(self) -> Dict[str, Any]:
        return self.config.get("ANALYSIS", {})

    @property
    def newton_tol(self) -> float:
        return float(self.network_config.get("NEWTON_TOL", 1e-10))

    @property
    def dt(self) -> float:
        return float(self.simulation_config.get("DT", 1e-3))

    @property
    def jacobian_stride(self) -> int:
        return int(self.simulation_config.get("JACOBIAN_STRIDE", 10))

    @property
    def eps_rel(self) -> float:
        return float(self.analysis_config.get("EPS_REL", 1e-6))

    @property
    def offdiag_threshold(self) -> float:
        return float(self.analysis_config.get("OFFDIAG_THRESHOLD", 0.1))

    @property
    def sigma_steps(self) -> int:
        return int(self.analysis_config.get("SIGMA_STEPS", 20))

    @property
    def shed_fd_step(self) -> float:
        return float(self.analysis_config.get("SHED_FD_STEP", 1e-4))

    @property
    def ordering_tol(self) -> float:
        return float(self.analysis_config.get("ORDERING_TOL", 1e-6))

    @property
    def output_dir(self) -> Path:
        return Path(self.config.get("OUTPUT", {}).get("DIR", "output"))

    @property
    def emit_plots(self) -> bool:
        return bool(self.config.get("OUTPUT", {}).get("EMIT_PLOTS", True))

    # === 算例与仿真 ===

    def load_case(self, ref: str) -> CaseFile:
        """按路径或内置名称加载算例"""
        return resolve_case(ref, quiet=self.quiet)

    def equilibrium(self, case: CaseFile) -> Equilibrium:
        """平衡点（同一算例在上下文内只初始化一次，供成对场景共享）"""
        key = case_hash(case)
        if key not in self._equilibria:
            self._equilibria[key] = init_equilibrium(case, self.config, quiet=self.quiet)
        return self._equilibria[key]

    def scenario(
        self,
        case: CaseFile,
        name: str,
        dt: Optional[float] = None,
        t_end: Optional[float] = None,
    ) -> Scenario:
        return scenario_from_case(case, name, self.config, dt=dt, t_end=t_end)

    def run(self, scenario: Scenario, equilibrium: Equilibrium, reduced: bool = False) -> TimeSeries:
        """运行场景，失败时抛出 SimulationError（命令行不写出部分结果）"""
        return run(scenario, equilibrium, reduced=reduced, quiet=self.quiet, raise_on_failure=True)

    # === 输出 ===

    def bundle_dir(self, out: Optional[str], default_name: str) -> Path:
        """--out 优先，否则为 OUTPUT.DIR/<default_name>"""
        return Path(out) if out else self.output_dir / default_name

    def write(
        self,
        bundle_dir: Path,
        timeseries: Sequence[TimeSeries] = (),
        reports: Optional[Mapping[str, Any]] = None,
        signals: Optional[Mapping[str, Sequence[str]]] = None,
        case: Optional[CaseFile] = None,
        extra: Optional[Mapping[str, Any]] = None,
    ) -> ResultBundle:
        metadata = run_metadata(
            case_hash=case_hash(case) if case is not None else None,
            config=self.config,
            extra=extra,
        )
        return write_results(
            bundle_dir,
            timeseries,
            reports,
            signals=signals,
            metadata=metadata,
            emit_plots=self.emit_plots,
            quiet=self.quiet,
        )
