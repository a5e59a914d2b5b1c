# coding=utf-8
"""
仿真模块 - 事件、平衡点初始化、RK4 时域仿真与线性示例
"""

from voltmono.simulation.events import (
    DEFAULT_FAULT_ADMITTANCE,
    Event,
    EventKind,
    EventSample,
    Scenario,
    apply_event,
    scenario_from_case,
)
from voltmono.simulation.timeseries import TimeSeries, TimeSeriesBuilder
from voltmono.simulation.initializer import Equilibrium, init_equilibrium, initialize_system
from voltmono.simulation.runner import (
    GainSweepPoint,
    ScenarioComparison,
    TikhonovPoint,
    compare_scenarios,
    gain_sweep,
    run,
    run_reduced,
    tikhonov_gap,
)
from voltmono.simulation.linear_demo import (
    LINEAR_A,
    LINEAR_B,
    LINEAR_C,
    linear_demo_system,
    linear_demo_verdict,
    run_linear_demo,
    steady_state,
)

__all__ = [
    "DEFAULT_FAULT_ADMITTANCE",
    "Event",
    "EventKind",
    "EventSample",
    "Scenario",
    "apply_event",
    "scenario_from_case",
    "TimeSeries",
    "TimeSeriesBuilder",
    "Equilibrium",
    "init_equilibrium",
    "initialize_system",
    "GainSweepPoint",
    "ScenarioComparison",
    "TikhonovPoint",
    "compare_scenarios",
    "gain_sweep",
    "run",
    "run_reduced",
    "tikhonov_gap",
    "LINEAR_A",
    "LINEAR_B",
    "LINEAR_C",
    "linear_demo_system",
    "linear_demo_verdict",
    "run_linear_demo",
    "steady_state",
]
