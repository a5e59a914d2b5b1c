# coding=utf-8
"""仿真：平衡点、事件、RK4 积分、降阶模型、线性示例与增益扫描"""

import numpy as np
import pytest

from voltmono.simulation import (
    Event,
    EventKind,
    Scenario,
    apply_event,
    compare_scenarios,
    gain_sweep,
    linear_demo_verdict,
    run,
    run_linear_demo,
    run_reduced,
    scenario_from_case,
    steady_state,
    tikhonov_gap,
)
from voltmono.monotone import Regime, Verdict
from voltmono.utils.errors import InvalidParameterError, SimulationError, UnknownTargetError


class TestEquilibrium:
    def test_smib_is_stationary(self, smib_eq):
        assert smib_eq.derivative_norm <= 1e-8
        np.testing.assert_allclose(smib_eq.system.rhs(smib_eq.x, smib_eq.V), 0.0, atol=1e-8)
        assert abs(smib_eq.x[0]) <= np.pi / 4
        assert smib_eq.system.residual(smib_eq.x, smib_eq.V) <= 1e-10

    def test_summary(self, smib_eq):
        summary = smib_eq.summary()
        assert summary["derivative_norm"] == smib_eq.derivative_norm
        assert 0.8 < summary["vmag_min"] <= summary["vmag_max"] <= 1.0 + 1e-8

    def test_unperturbed_run_stays_put(self, smib_eq):
        series = run(Scenario(name="still", t_end=0.5, dt=1e-3), smib_eq)
        assert series.status == "complete"
        assert np.max(np.abs(series.states - smib_eq.x)) <= 1e-6

    @pytest.mark.slow
    def test_case39_sg_equilibrium(self, case39_sg, config):
        from voltmono.simulation import init_equilibrium

        eq = init_equilibrium(case39_sg, config)
        assert eq.derivative_norm <= 1e-8
        angles = eq.x[eq.system.layout.angle_index]
        assert np.max(np.abs(angles)) <= np.pi / 4


class TestEvents:
    def test_fault_on_off_restores_admittance(self, smib_eq):
        system = smib_eq.system
        on = apply_event(system, Event(0.1, EventKind.FAULT_ON, 1, admittance=-5j))
        assert on.network.Y[1, 1] != system.network.Y[1, 1]
        off = apply_event(on, Event(0.15, EventKind.FAULT_OFF, 1))
        assert np.array_equal(off.network.Y, system.network.Y)

    def test_clearing_absent_fault(self, smib_eq):
        with pytest.raises(UnknownTargetError):
            apply_event(smib_eq.system, Event(0.1, EventKind.FAULT_OFF, 1))

    def test_load_shed(self, smib_eq):
        system = smib_eq.system.with_load(1, 5 + 4j)
        shed = apply_event(system, Event(0.0, EventKind.LOAD_SHED, 1, dq=1.0))
        assert shed.load_power[1] == pytest.approx(5 + 3j)
        assert system.load_power[1] == pytest.approx(5 + 4j)

    def test_vref_step(self, smib_eq):
        before = smib_eq.system.devices[0].v_ref
        stepped = apply_event(smib_eq.system, Event(0.1, EventKind.VREF_STEP, 0, value=0.01))
        assert stepped.devices[0].v_ref == pytest.approx(before + 0.01)
        assert smib_eq.system.devices[0].v_ref == before

    def test_qref_step_needs_converter(self, smib_eq):
        with pytest.raises(UnknownTargetError):
            apply_event(smib_eq.system, Event(0.1, EventKind.QREF_STEP, 0, value=0.1))

    def test_unknown_bus(self, smib_eq):
        with pytest.raises(UnknownTargetError):
            apply_event(smib_eq.system, Event(0.1, EventKind.LOAD_SHED, 7, dq=0.1))

    def test_negative_time(self):
        with pytest.raises(InvalidParameterError):
            Event(-0.1, EventKind.FAULT_ON, 0)

    def test_scenario_validation_and_ordering(self):
        with pytest.raises(InvalidParameterError):
            Scenario(dt=0.0)
        with pytest.raises(InvalidParameterError):
            Scenario(t_end=-1.0)
        sc = Scenario(events=(Event(0.2, EventKind.FAULT_OFF, 0), Event(0.1, EventKind.FAULT_ON, 0)))
        assert [e.time for e in sc.events] == [0.1, 0.2]

    def test_scenario_from_case_maps_bus_numbers(self, smib_case, config):
        sc = scenario_from_case(smib_case, "fault", config)
        assert [e.bus for e in sc.events] == [1, 1]
        assert sc.events[0].admittance == pytest.approx(-5j)
        assert sc.jacobian_stride == 10
        assert sc.n_steps == 2000


class TestRun:
    @pytest.fixture(scope="class")
    def fault_run(self, smib_case, smib_eq, config):
        return run(scenario_from_case(smib_case, "fault", config, t_end=0.5), smib_eq)

    def test_grid_and_events(self, fault_run):
        assert fault_run.status == "complete"
        assert len(fault_run.times) == 501
        np.testing.assert_allclose(fault_run.times, np.arange(501) * 1e-3, atol=1e-12)
        assert np.all(np.diff(fault_run.times) > 0)
        assert [s.kind for s in fault_run.event_samples] == ["fault_on", "fault_off"]

    def test_fault_depresses_voltage(self, fault_run):
        sample = fault_run.event_samples[0]
        assert sample.post_vmag[1] < sample.pre_vmag[1]
        i = fault_run.sample_at(0.12)
        assert fault_run.signal("vm@2")[i] < fault_run.signal("vm@2")[0]

    def test_fault_clears_and_voltage_recovers(self, fault_run):
        assert np.min(np.abs(fault_run.voltages)) > 0.1
        vm2 = fault_run.signal("vm@2")
        assert 0.1 < vm2[fault_run.sample_at(0.12)] < 0.6
        cleared = fault_run.event_samples[1]
        assert cleared.post_vmag[1] > 0.8
        assert vm2[-1] == pytest.approx(vm2[0], abs=0.1)

    def test_jacobian_snapshots(self, fault_run):
        assert len(fault_run.jacobians) == 51
        assert fault_run.jacobian_times[0] == 0.0
        assert fault_run.jacobians[0].J_full.shape == (4, 4)

    def test_signals(self, fault_run):
        names = fault_run.signal_names()
        for name in ("delta@1", "eq@1", "vm@1", "vm@2", "va@2", "pe@1", "qc@1"):
            assert name in names
        with pytest.raises(InvalidParameterError):
            fault_run.signal("vm@9")

    def test_deterministic(self, smib_case, smib_eq, config):
        sc = scenario_from_case(smib_case, "fault", config, t_end=0.2)
        a, b = run(sc, smib_eq), run(sc, smib_eq)
        assert np.array_equal(a.states, b.states)
        assert np.array_equal(a.voltages, b.voltages)

    def test_failure_returns_partial_series(self, smib_eq):
        sc = Scenario(name="bad", events=(Event(0.05, EventKind.FAULT_OFF, 1),), t_end=0.1, dt=1e-3)
        partial = run(sc, smib_eq)
        assert partial.failed
        assert partial.error["code"] == "UNKNOWN_TARGET"
        assert 0 < len(partial.times) < 101
        with pytest.raises(SimulationError) as exc:
            run(sc, smib_eq, raise_on_failure=True)
        assert exc.value.partial.failed

    def test_reference_step_ordering(self, smib_case, smib_eq, config):
        base = run(scenario_from_case(smib_case, "base", config, t_end=1.0), smib_eq)
        step = run(scenario_from_case(smib_case, "vref_step", config, t_end=1.0), smib_eq)
        comparison = compare_scenarios(base, step, ["vm@1", "vm@2", "eq@1"])
        assert comparison.report.holds
        assert step.signal("vm@1")[-1] > base.signal("vm@1")[-1]

    def test_reduced_model_from_equilibrium(self, smib_eq):
        series = run_reduced(Scenario(name="still", t_end=0.2, dt=1e-3), smib_eq)
        assert series.name == "still_reduced"
        assert np.max(np.abs(series.states - smib_eq.x)) <= 1e-6


class TestLinearDemo:
    def test_verdict(self):
        assert linear_demo_verdict().verdict == Verdict.INPUT_STATE_OUTPUT_MONOTONE

    def test_steady_state(self, linear_demo):
        lo, hi = linear_demo
        x_inf, y_inf = steady_state(1.0)
        np.testing.assert_allclose(x_inf, [5.4, 1.8, 0.7])
        assert y_inf == pytest.approx(3.2)
        np.testing.assert_allclose(lo.states[-1], x_inf, atol=1e-9)
        np.testing.assert_allclose(hi.states[-1], 2 * x_inf, atol=1e-9)
        assert lo.signal("y")[-1] == pytest.approx(3.2, abs=1e-9)

    def test_zero_input_stays_zero(self):
        series = run_linear_demo(0.0, t_end=1.0)
        assert np.all(series.states == 0.0)

    def test_names_and_grid(self, linear_demo):
        lo, hi = linear_demo
        assert (lo.name, hi.name) == ("linear_x1", "linear_x2")
        assert len(lo.times) == 4001

    def test_negative_input_rejected(self):
        with pytest.raises(InvalidParameterError):
            run_linear_demo(-1.0)


class TestSweeps:
    def test_gain_sweep_single_machine(self, smib_case, config):
        points = gain_sweep(smib_case, [0.5, 1.0, 2.0], config)
        assert [p.scale for p in points] == [0.5, 1.0, 2.0]
        for point in points:
            assert point.regime.regime == Regime.COOPERATIVE
            assert point.verdict.verdict == Verdict.INPUT_STATE_OUTPUT_MONOTONE
            assert point.certificate.certified_stable

    @pytest.mark.slow
    def test_tikhonov_gap_shrinks(self, smib_case, config):
        sc = scenario_from_case(smib_case, "vref_step", config, t_end=1.0)
        points = tikhonov_gap(smib_case, sc, [1.0, 0.3, 0.1], config)
        gaps = [p.gap for p in points]
        assert not any(p.failed for p in points)
        assert gaps[0] > gaps[1] > gaps[2] > 0
