# coding=utf-8
"""
voltmono 命令行入口

子命令：
    simulate        运行场景并写出时间序列
    jacobian        平衡点或某一时刻的轨迹雅可比与符号矩阵
    signpattern     沿轨迹检查电压子系统符号模板
    monotone-check  两个场景在选定信号上的序关系
    loadshed-scan   切负荷 Υ′ 扫描
    linear-demo     三阶线性示例
    reduce          全阶与降阶模型对比
    gain-sweep      电压调节增益扫描与分区
    tikhonov        快速时间常数缩放下的降阶误差

成功返回 0；运行错误向 stderr 输出一行 JSON 并返回 1；参数错误返回 2。
"""

import argparse
import json
import sys
from dataclasses import replace
from typing import Any, Callable, Dict, List, Optional, Sequence

import numpy as np

from voltmono import __version__
from voltmono.context import AppContext
from voltmono.core.loader import load_config_or_default
from voltmono.jacobian import SensitivityMethod, trajectory_jacobian
from voltmono.monotone import (
    Regime,
    classify_regime,
    ordering_check,
    sign_pattern,
    template_matches,
    template_mismatches,
    upsilon_scan,
    voltage_template,
)
from voltmono.report import render_report
from voltmono.simulation import (
    apply_event,
    compare_scenarios,
    gain_sweep,
    linear_demo_verdict,
    run_linear_demo,
    steady_state,
    tikhonov_gap,
)
from voltmono.utils.errors import InvalidParameterError, VoltMonoError


def _floats(text: str) -> List[float]:
    """逗号分隔的数字列表"""
    try:
        return [float(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"需要逗号分隔的数字: {text}")


def _emit(ctx: AppContext, name: str, report: Dict[str, Any], bundle) -> None:
    print(render_report(name, report), end="")
    if not ctx.quiet:
        print(f"[输出] {bundle.directory}")


def _voltage_signs(system, J: np.ndarray, eps_rel: float, t: float) -> Dict[str, Any]:
    """电压子系统符号矩阵与模板比对"""
    vidx = system.layout.voltage_index
    sub = sign_pattern(J[np.ix_(vidx, vidx)], eps_rel, source_time=t)
    template = voltage_template(len(system.devices))
    return {
        "t": t,
        "labels": [system.layout.labels[i] for i in vidx],
        "signs": sub.to_dict()["signs"],
        "eps_abs": sub.eps_abs,
        "matches": template_matches(sub.signs, template),
        "mismatches": [list(p) for p in template_mismatches(sub.signs, template)],
    }


# =============================================================================
# 子命令
# =============================================================================


def cmd_simulate(ctx: AppContext, args) -> int:
    case = ctx.load_case(args.case)
    eq = ctx.equilibrium(case)
    scenario = ctx.scenario(case, args.scenario, dt=args.dt, t_end=args.t_end)
    series = ctx.run(scenario, eq, reduced=args.reduced)

    signals = args.signals or list(scenario.record) or None
    report = {
        "case": case.name,
        "scenario": scenario.name,
        "reduced": args.reduced,
        "equilibrium": eq.summary(),
        "run": series.summary(),
        "events": [s.to_dict() for s in series.event_samples],
    }
    bundle = ctx.write(
        ctx.bundle_dir(args.out, f"{case.name}_{series.name}"),
        [series],
        {"simulate": report},
        signals={series.name: signals} if signals else None,
        case=case,
    )
    _emit(ctx, "simulate", report, bundle)
    return 0


def cmd_jacobian(ctx: AppContext, args) -> int:
    case = ctx.load_case(args.case)
    eq = ctx.equilibrium(case)
    method = SensitivityMethod.APPROXIMATE if args.approx else SensitivityMethod.EXACT

    system, x, V, t = eq.system, eq.x, eq.V, 0.0
    if args.at is not None and args.at > 0:
        scenario = ctx.scenario(case, args.scenario, t_end=args.at)
        series = ctx.run(scenario, eq)
        t = float(series.times[-1])
        for event in scenario.events:
            if event.time <= t + 1e-9 * scenario.dt:
                system = apply_event(system, event, scenario.fault_admittance)
        x, V = series.states[-1], series.voltages[-1]

    jac = trajectory_jacobian(system, x, V, method=method, t=t)
    signs = _voltage_signs(system, jac.J_full, ctx.eps_rel, t)
    report = {
        "case": case.name,
        "method": method.value,
        "approximation_error": jac.approximation_error,
        "regime": classify_regime(jac.J_reduced, ctx.offdiag_threshold, ctx.eps_rel).to_dict(),
        "dVmag_dE_min": float(np.min(jac.dVmag_dE)) if jac.dVmag_dE.size else 0.0,
        **signs,
    }
    bundle = ctx.write(
        ctx.bundle_dir(args.out, f"{case.name}_jacobian"),
        reports={"sign_matrix": report, "jacobian": jac.to_dict()},
        case=case,
    )
    _emit(ctx, "sign_matrix", report, bundle)
    return 0


def cmd_signpattern(ctx: AppContext, args) -> int:
    case = ctx.load_case(args.case)
    eq = ctx.equilibrium(case)
    scenario = ctx.scenario(case, args.scenario)
    if scenario.jacobian_stride == 0:
        scenario = replace(scenario, jacobian_stride=ctx.jacobian_stride or 10)
    series = ctx.run(scenario, eq)
    eps_rel = args.eps if args.eps is not None else ctx.eps_rel

    timeline = []
    cooperative = 0
    for jac in series.jacobians:
        entry = _voltage_signs(eq.system, jac.J_full, eps_rel, jac.t)
        regime = classify_regime(jac.J_reduced, ctx.offdiag_threshold, eps_rel).regime
        cooperative += regime == Regime.COOPERATIVE
        timeline.append({"t": jac.t, "matches": entry["matches"], "mismatches": len(entry["mismatches"])})

    n = len(timeline)
    first = _voltage_signs(eq.system, series.jacobians[0].J_full, eps_rel, 0.0) if n else {}
    report = {
        "case": case.name,
        "scenario": scenario.name,
        "eps_rel": eps_rel,
        "snapshots": n,
        "match_fraction": sum(p["matches"] for p in timeline) / n if n else 1.0,
        "cooperative_fraction": cooperative / n if n else 1.0,
        "timeline": timeline,
        "labels": first.get("labels", []),
        "signs": first.get("signs", []),
    }
    bundle = ctx.write(
        ctx.bundle_dir(args.out, f"{case.name}_{scenario.name}_signpattern"),
        [series],
        {"signpattern": report},
        signals={series.name: list(scenario.record)} if scenario.record else None,
        case=case,
    )
    _emit(ctx, "signpattern", report, bundle)
    return 0


def cmd_monotone_check(ctx: AppContext, args) -> int:
    case = ctx.load_case(args.case)
    eq = ctx.equilibrium(case)
    base_name, variant_name = args.scenario_pair
    base = ctx.run(ctx.scenario(case, base_name), eq)
    variant = ctx.run(ctx.scenario(case, variant_name), eq)

    signals = args.signals or [f"vm@{b}" for b in base.bus_labels]
    window = tuple(args.window) if args.window else None
    tol = args.tol if args.tol is not None else ctx.ordering_tol
    comparison = compare_scenarios(base, variant, signals, tol=tol, window=window)
    report = {"case": case.name, **comparison.to_dict()}
    bundle = ctx.write(
        ctx.bundle_dir(args.out, f"{case.name}_{base_name}_vs_{variant_name}"),
        [base, variant],
        {"ordering": report},
        signals={base.name: signals, variant.name: signals},
        case=case,
    )
    _emit(ctx, "ordering", report, bundle)
    return 0


def cmd_loadshed_scan(ctx: AppContext, args) -> int:
    case = ctx.load_case(args.case)
    eq = ctx.equilibrium(case)
    unit = case.system.base_mva if args.mvar else 1.0
    outputs = [case.bus_id(b) for b in args.outputs] if args.outputs else None

    scan = upsilon_scan(
        eq,
        bus=case.bus_id(args.bus),
        shed_v1=args.shed_hi / unit,
        shed_v2=args.shed_lo / unit,
        t_samples=args.times,
        sigma_steps=args.sigma_steps or ctx.sigma_steps,
        dt=ctx.dt,
        output_buses=outputs,
        fd_step=ctx.shed_fd_step,
        refine=args.refine,
        quiet=ctx.quiet,
    )
    report = {"case": case.name, "bus": args.bus, **scan.to_dict()}
    bundle = ctx.write(
        ctx.bundle_dir(args.out, f"{case.name}_loadshed_{args.bus}"),
        reports={"upsilon": report},
        case=case,
    )
    summary = {k: v for k, v in report.items() if k not in ("sigma", "upsilon_prime")}
    _emit(ctx, "upsilon", summary, bundle)
    return 0


def cmd_linear_demo(ctx: AppContext, args) -> int:
    scales = sorted(args.scales)
    if any(s < 0 for s in scales):
        raise InvalidParameterError(f"输入幅值必须非负: {args.scales}")
    runs = [run_linear_demo(s, t_end=args.t_end, dt=args.dt) for s in scales]
    signals = ["x1", "x2", "x3", "y"]

    orderings = []
    for lo, hi, s_lo, s_hi in zip(runs, runs[1:], scales, scales[1:]):
        check = ordering_check(hi, lo, signals, tol=1e-9)
        orderings.append({"lo": s_lo, "hi": s_hi, **check.to_dict()})
    steady = []
    for series, s in zip(runs, scales):
        x_inf, y_inf = steady_state(s)
        steady.append({
            "scale": s,
            "y_inf": y_inf,
            "final_state_error": float(np.max(np.abs(series.states[-1] - x_inf))),
        })

    report = {
        "verdict": linear_demo_verdict().to_dict(),
        "holds": all(o["holds"] for o in orderings),
        "orderings": orderings,
        "steady_state": steady,
    }
    bundle = ctx.write(ctx.bundle_dir(args.out, "linear_demo"), runs, {"linear_demo": report})
    _emit(ctx, "linear_demo", report, bundle)
    return 0


def cmd_reduce(ctx: AppContext, args) -> int:
    case = ctx.load_case(args.case)
    eq = ctx.equilibrium(case)
    scenario = ctx.scenario(case, args.scenario)
    full = ctx.run(scenario, eq)
    reduced = ctx.run(scenario, eq, reduced=True)

    idx = eq.system.layout.internal_index
    labels = [eq.system.layout.labels[i] for i in idx]
    gaps = np.max(np.abs(full.states[:, idx] - reduced.states[:, idx]), axis=0) if len(idx) else np.zeros(0)
    report = {
        "case": case.name,
        "scenario": scenario.name,
        "gap": float(np.max(gaps)) if gaps.size else 0.0,
        "gap_per_state": {label: float(g) for label, g in zip(labels, gaps)},
    }
    signals = labels + [f"vm@{eq.system.network.buses[d.bus].label}" for d in eq.system.devices]
    bundle = ctx.write(
        ctx.bundle_dir(args.out, f"{case.name}_{scenario.name}_reduce"),
        [full, reduced],
        {"reduce": report},
        signals={full.name: signals, reduced.name: signals},
        case=case,
    )
    _emit(ctx, "reduce", report, bundle)
    return 0


def cmd_gain_sweep(ctx: AppContext, args) -> int:
    case = ctx.load_case(args.case)
    points = gain_sweep(case, args.scales, ctx.config, quiet=ctx.quiet)
    report = {"case": case.name, "points": [p.to_dict() for p in points]}
    bundle = ctx.write(ctx.bundle_dir(args.out, f"{case.name}_gain_sweep"), reports={"gain_sweep": report}, case=case)
    _emit(ctx, "gain_sweep", report, bundle)
    return 0


def cmd_tikhonov(ctx: AppContext, args) -> int:
    case = ctx.load_case(args.case)
    scenario = ctx.scenario(case, args.scenario)
    points = tikhonov_gap(case, scenario, args.scales, ctx.config, quiet=ctx.quiet)
    gaps = [p.gap for p in points]
    report = {
        "case": case.name,
        "scenario": scenario.name,
        "points": [p.to_dict() for p in points],
        "gap_decreasing": all(b < a for a, b in zip(gaps, gaps[1:])),
    }
    bundle = ctx.write(ctx.bundle_dir(args.out, f"{case.name}_tikhonov"), reports={"tikhonov": report}, case=case)
    _emit(ctx, "tikhonov", report, bundle)
    return 0


COMMANDS: Dict[str, Callable[[AppContext, Any], int]] = {
    "simulate": cmd_simulate,
    "jacobian": cmd_jacobian,
    "signpattern": cmd_signpattern,
    "monotone-check": cmd_monotone_check,
    "loadshed-scan": cmd_loadshed_scan,
    "linear-demo": cmd_linear_demo,
    "reduce": cmd_reduce,
    "gain-sweep": cmd_gain_sweep,
    "tikhonov": cmd_tikhonov,
}


# =============================================================================
# 参数解析
# =============================================================================


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", default=None, help="配置文件路径（默认 config/config.yaml，缺失时使用内置默认值）")
    common.add_argument("--out", default=None, help="结果目录（默认 $VOLTMONO_OUTPUT_DIR 或 output/ 下的子目录）")
    common.add_argument("--quiet", action="store_true", help="不输出进度信息")
    common.add_argument("--no-plots", action="store_true", help="不生成绘图脚本")

    parser = argparse.ArgumentParser(
        prog="voltmono",
        description=f"voltmono {__version__} - 电力系统电压动态仿真与单调性分析",
        formatter_class=argparse.RawDescriptionHelpFormatter,
        epilog="""
示例:
  voltmono simulate --case case39_sg --scenario fault_006 --out out/fault
  voltmono jacobian --case case39_sg --equilibrium
  voltmono signpattern --case case39_sg --scenario fault_015 --eps 1e-6
  voltmono monotone-check --case case39_gfm --scenario-pair base vref_step --signals vm@30 evir@30
  voltmono loadshed-scan --case case39_gfm --bus 4 --shed-lo 1.0 --shed-hi 2.0
  voltmono linear-demo --scales 1,2
  voltmono reduce --case smib --scenario vref_step
  voltmono gain-sweep --case case39_sg --scales 0.25,1,4
  voltmono tikhonov --case smib --scenario vref_step --scales 1,0.3,0.1

--case 既可以是算例文件路径，也可以是内置算例名（smib / case39_sg / case39_gfm）。
""",
    )
    parser.add_argument("--version", action="version", version=f"voltmono {__version__}")
    sub = parser.add_subparsers(dest="command", metavar="<command>")
    sub.required = True

    p = sub.add_parser("simulate", parents=[common], help="运行场景")
    p.add_argument("--case", required=True)
    p.add_argument("--scenario", default="base")
    p.add_argument("--dt", type=float, default=None)
    p.add_argument("--t-end", type=float, default=None)
    p.add_argument("--reduced", action="store_true", help="积分降阶模型")
    p.add_argument("--signals", nargs="+", default=None, help="输出信号，如 vm@30 eq@30")

    p = sub.add_parser("jacobian", parents=[common], help="轨迹雅可比与符号矩阵")
    p.add_argument("--case", required=True)
    group = p.add_mutually_exclusive_group()
    group.add_argument("--at", type=float, default=None, help="仿真到该时刻后求雅可比")
    group.add_argument("--equilibrium", action="store_true", help="在平衡点求雅可比（默认）")
    p.add_argument("--scenario", default="base", help="与 --at 配合使用的场景")
    p.add_argument("--approx", action="store_true", help="使用 A⁻¹C 近似电压灵敏度")

    p = sub.add_parser("signpattern", parents=[common], help="沿轨迹检查符号模板")
    p.add_argument("--case", required=True)
    p.add_argument("--scenario", required=True)
    p.add_argument("--eps", type=float, default=None, help="符号判定相对阈值")

    p = sub.add_parser("monotone-check", parents=[common], help="两个场景的序关系")
    p.add_argument("--case", required=True)
    p.add_argument("--scenario-pair", nargs=2, required=True, metavar=("BASE", "VARIANT"))
    p.add_argument("--signals", nargs="+", default=None)
    p.add_argument("--window", nargs=2, type=float, default=None, metavar=("T0", "T1"))
    p.add_argument("--tol", type=float, default=None)

    p = sub.add_parser("loadshed-scan", parents=[common], help="切负荷 Υ′ 扫描")
    p.add_argument("--case", required=True)
    p.add_argument("--bus", type=int, required=True, help="切负荷母线（算例编号）")
    p.add_argument("--shed-lo", type=float, required=True)
    p.add_argument("--shed-hi", type=float, required=True)
    p.add_argument("--mvar", action="store_true", help="切除量以 Mvar 给出")
    p.add_argument("--sigma-steps", type=int, default=None)
    p.add_argument("--times", type=_floats, default=[0.0, 0.5, 1.0, 1.5, 2.0], help="检查时刻，如 0,0.5,1")
    p.add_argument("--outputs", type=int, nargs="+", default=None, help="输出母线（默认为切负荷母线）")
    p.add_argument("--refine", action="store_true", help="加倍 σ 网格复算最小值")

    p = sub.add_parser("linear-demo", parents=[common], help="三阶线性示例")
    p.add_argument("--scales", type=_floats, default=[1.0, 2.0])
    p.add_argument("--t-end", type=float, default=40.0)
    p.add_argument("--dt", type=float, default=1e-2)

    p = sub.add_parser("reduce", parents=[common], help="全阶与降阶模型对比")
    p.add_argument("--case", required=True)
    p.add_argument("--scenario", required=True)

    p = sub.add_parser("gain-sweep", parents=[common], help="电压调节增益扫描")
    p.add_argument("--case", required=True)
    p.add_argument("--scales", type=_floats, default=[0.25, 0.5, 1.0, 2.0, 4.0])

    p = sub.add_parser("tikhonov", parents=[common], help="快速时间常数缩放下的降阶误差")
    p.add_argument("--case", required=True)
    p.add_argument("--scenario", default="vref_step")
    p.add_argument("--scales", type=_floats, default=[1.0, 0.3, 0.1])

    return parser


def _print_error(error: Dict[str, Any]) -> None:
    print(json.dumps(error, ensure_ascii=False), file=sys.stderr)


def main(argv: Optional[Sequence[str]] = None) -> int:
    """主程序入口，返回退出码"""
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return e.code if isinstance(e.code, int) else 2

    debug_mode = False
    try:
        config = load_config_or_default(args.config)
        if args.quiet:
            config = {**config, "QUIET": True}
        if args.no_plots:
            config = {**config, "OUTPUT": {**config.get("OUTPUT", {}), "EMIT_PLOTS": False}}
        debug_mode = bool(config.get("DEBUG", False))
        return COMMANDS[args.command](AppContext(config), args)
    except VoltMonoError as e:
        _print_error(e.to_dict())
        if debug_mode:
            raise
        return 1
    except FileNotFoundError as e:
        _print_error({"code": "FILE_NOT_FOUND", "message": str(e)})
        return 1


def cli_main(argv: Optional[Sequence[str]] = None) -> int:
    return main(argv)


if __name__ == "__main__":
    sys.exit(main())
