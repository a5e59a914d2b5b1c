# coding=utf-8
"""轨迹雅可比：电压灵敏度、全阶/降阶雅可比及交叉校验"""

from dataclasses import replace

import numpy as np
import pytest

from conftest import state_fd
from voltmono.cases import build_system, parse_case_text
from voltmono.devices import GridFormingConverter
from voltmono.jacobian import (
    SensitivityBundle,
    SensitivityMethod,
    compose_reduced,
    output_matrix,
    reduced_input_matrix,
    reduced_jacobian,
    system_bundle,
    trajectory_jacobian,
    trajectory_jacobian_stacked,
    voltage_magnitude_sensitivity,
    voltage_sensitivity_approx,
    voltage_sensitivity_exact,
)
from voltmono.monotone import sign_pattern, template_matches, voltage_template
from voltmono.simulation import init_equilibrium
from voltmono.utils.errors import SingularSchurComplement, StaleVoltageProfile

GFM_ONLY = """
format: voltmono-case/1
name: gfm_only
system: {base_mva: 100.0, frequency_hz: 60.0, slack_bus: 1}
buses: [1, 2]
branches:
  - {from: 1, to: 2, x: 0.5}
devices:
  - kind: gfm
    bus: 1
    params: {K_i: 0.1, K_d: 5.0, T_w: 0.02, K_u: 1.0, H_vir: 5.0}
"""


@pytest.fixture(scope="module")
def tight(smib_eq):
    """收紧网络求解容差的 SMIB 平衡点，供差分对照"""
    system = replace(smib_eq.system, newton_tol=1e-13)
    V = system.solve(smib_eq.x, smib_eq.V).V
    return system, smib_eq.x, V


class TestVoltageSensitivity:
    def test_exact_matches_network_resolve(self, tight):
        system, x, V = tight
        dV_dx = voltage_sensitivity_exact(system_bundle(system, x, V))
        fd = state_fd(lambda s: system.solve(s, V).V, x, h=1e-5)
        np.testing.assert_allclose(dV_dx, fd, atol=1e-6)

    def test_approximation_differs_but_is_close(self, tight):
        system, x, V = tight
        bundle = system_bundle(system, x, V)
        exact = voltage_sensitivity_exact(bundle)
        approx = voltage_sensitivity_approx(bundle)
        assert not np.allclose(exact, approx)
        report = trajectory_jacobian(system, x, V, method=SensitivityMethod.APPROXIMATE)
        assert report.approximation_error is not None
        assert report.approximation_error >= 0

    def test_stale_voltage_rejected(self, smib_eq):
        with pytest.raises(StaleVoltageProfile):
            system_bundle(smib_eq.system, smib_eq.x, smib_eq.V * 1.01)

    def test_magnitude_sensitivity_matches_difference(self, tight):
        system, x, V = tight
        dV_dx = voltage_sensitivity_exact(system_bundle(system, x, V))
        fd = state_fd(lambda s: np.abs(system.solve(s, V).V), x, h=1e-5)
        np.testing.assert_allclose(voltage_magnitude_sensitivity(dV_dx, V), fd, atol=1e-6)

    def test_magnitude_sensitivity_positive(self, smib_eq):
        report = trajectory_jacobian(smib_eq.system, smib_eq.x, smib_eq.V)
        assert report.dVmag_dE.shape == (2, 1)
        assert np.all(report.dVmag_dE > 0)


class TestTrajectoryJacobian:
    def test_full_matches_closed_loop_difference(self, tight):
        system, x, V = tight
        J = trajectory_jacobian(system, x, V).J_full
        fd = state_fd(lambda s: system.rhs(s, system.solve(s, V).V), x, h=1e-5)
        np.testing.assert_allclose(J, fd, atol=1e-4 * np.max(np.abs(J)))

    def test_stacked_real_agrees(self, smib_eq):
        J = trajectory_jacobian(smib_eq.system, smib_eq.x, smib_eq.V).J_full
        J_stacked = trajectory_jacobian_stacked(smib_eq.system, smib_eq.x, smib_eq.V)
        np.testing.assert_allclose(J_stacked, J, atol=1e-9 * np.max(np.abs(J)))

    def test_labels_follow_layout(self, smib_eq):
        report = trajectory_jacobian(smib_eq.system, smib_eq.x, smib_eq.V)
        assert report.state_labels == ("delta@1", "omega@1", "eq@1", "efd@1")
        assert report.reduced_labels == ("eq@1",)

    def test_reduced_composition(self, smib_eq):
        system = smib_eq.system
        report = trajectory_jacobian(system, smib_eq.x, smib_eq.V)
        J = report.J_full
        params = system.devices[0].params
        expected = J[2, 2] + (params.T_A / params.T_d0_prime) * J[3, 2]
        assert compose_reduced(system, J)[0, 0] == pytest.approx(expected)
        assert report.J_reduced[0, 0] < 0

    def test_voltage_subsystem_constants(self, smib_eq):
        J = trajectory_jacobian(smib_eq.system, smib_eq.x, smib_eq.V).J_full
        params = smib_eq.system.devices[0].params
        assert J[3, 3] == pytest.approx(-1 / params.T_A)
        assert J[2, 3] == pytest.approx(1 / params.T_d0_prime)
        assert J[3, 2] < 0

    def test_equilibrium_voltage_block_matches_template(self, smib_eq):
        J = trajectory_jacobian(smib_eq.system, smib_eq.x, smib_eq.V).J_full
        idx = smib_eq.system.layout.voltage_index
        assert J[2, 2] < 0
        signs = sign_pattern(J[np.ix_(idx, idx)]).signs
        assert template_matches(signs, voltage_template(1))

    def test_ill_conditioned_solve_raises(self):
        A = np.array([[1.0, 2.0, 3.0], [4.0, 5.0, 6.0], [7.0, 8.0, 9.0]], dtype=complex)
        bundle = SensitivityBundle(A=A, B=np.zeros((3, 3), dtype=complex), C=np.ones((3, 1), dtype=complex))
        with pytest.raises(SingularSchurComplement):
            voltage_sensitivity_exact(bundle)

    def test_reduced_jacobian_uses_projected_exciter(self, smib_eq):
        rj = reduced_jacobian(smib_eq.system, smib_eq.x, smib_eq.V)
        assert rj.matrix.shape == (1, 1)
        assert rj.labels == ("eq@1",)
        assert rj.offdiag_sign == "nonnegative"


class TestGridForming:
    def test_unloaded_converter_equilibrium(self):
        eq = init_equilibrium(parse_case_text(GFM_ONLY))
        assert eq.derivative_norm <= 1e-10
        assert eq.x[2] == pytest.approx(1.0)
        assert isinstance(eq.system.devices[0], GridFormingConverter)
        assert eq.system.devices[0].params.V_ref == pytest.approx(1.0)

    def test_input_matrix(self):
        system, _ = build_system(parse_case_text(GFM_ONLY))
        np.testing.assert_allclose(reduced_input_matrix(system), [[10.0]])

    def test_stacked_real_agrees(self):
        eq = init_equilibrium(parse_case_text(GFM_ONLY))
        J = trajectory_jacobian(eq.system, eq.x, eq.V).J_full
        J_stacked = trajectory_jacobian_stacked(eq.system, eq.x, eq.V)
        np.testing.assert_allclose(J_stacked, J, atol=1e-9 * np.max(np.abs(J)))


@pytest.mark.slow
class TestCase39:
    def test_sg_equilibrium_and_shapes(self, case39_sg, config):
        eq = init_equilibrium(case39_sg, config)
        report = trajectory_jacobian(eq.system, eq.x, eq.V)
        assert report.J_full.shape == (40, 40)
        assert report.J_reduced.shape == (10, 10)
        assert report.dVmag_dE.shape == (39, 10)
        assert output_matrix(eq.system, report).shape == (10, 10)
        J_stacked = trajectory_jacobian_stacked(eq.system, eq.x, eq.V)
        np.testing.assert_allclose(J_stacked, report.J_full, atol=1e-8 * np.max(np.abs(report.J_full)))

    def test_gfm_input_gains(self, case39_gfm, config):
        eq = init_equilibrium(case39_gfm, config)
        gains = np.diag(reduced_input_matrix(eq.system))
        gfm = [k for k, d in enumerate(eq.system.devices) if isinstance(d, GridFormingConverter)]
        assert len(gfm) == 4
        np.testing.assert_allclose(gains[gfm], 10.0)
        assert np.all(gains > 0)
