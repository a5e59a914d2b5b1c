# coding=utf-8
"""设备模型：注入功率、状态方程、解析偏导与平衡点"""

import numpy as np
import pytest

from conftest import state_fd, wirtinger_fd
from voltmono.devices import (
    GfmParams,
    GfmState,
    GridFormingConverter,
    SgParams,
    SgState,
    SynchronousGenerator,
    device_partials,
    gfm_equilibrium,
    gfm_injection,
    load_injection,
    quasi_steady_exciter,
    sg_equilibrium,
    sg_injection,
)
from voltmono.devices.base import ANGLE, EXCITER, INTERNAL, SPEED
from voltmono.utils.errors import LowVoltageRegime, ValidationError

OMEGA_S = 2 * np.pi * 60

SG = SgParams(x_d=1.8, x_q=1.7, x_d_prime=0.3, T_d0_prime=8.0, K_A=50.0, T_A=0.05, H=3.5, D=2.0, V_ref=1.05, P_m=0.6)
GFM = GfmParams(V_ref=1.02, Q_ref=0.1, P_ref=0.4)
V0 = 0.98 * np.exp(0.2j)


@pytest.fixture(params=["sg", "gfm"])
def device_and_state(request):
    if request.param == "sg":
        return SynchronousGenerator(bus=0, params=SG), np.array([0.45, 0.002, 1.1, 2.3])
    return GridFormingConverter(bus=0, params=GFM), np.array([0.35, -0.001, 1.07, 0.05])


class TestInjection:
    def test_gfm_reference_value(self):
        g = gfm_injection(GfmParams(x_l=0.1), GfmState(0.0, 0.0, 1.05, 0.0), 1.0)
        assert g == pytest.approx(-0.5j)

    def test_sg_round_rotor_closed_form(self):
        params = SgParams(x_d=1.0, x_q=0.3, x_d_prime=0.3, T_d0_prime=5.0, K_A=10.0, T_A=0.1)
        state = SgState(0.3, 0.0, 1.2, 0.0)
        V = 1.0 * np.exp(0.1j)
        # x_q = x′d 时 I = (E′q·e^{jδ} − V)/(j·x′d)，ḡ = V̄·I
        E = state.e_q * np.exp(1j * state.delta)
        expected = np.conj(V) * (E - V) / (1j * 0.3)
        assert sg_injection(params, state, V) == pytest.approx(expected)

    def test_zero_voltage_rejected(self, device_and_state):
        device, x = device_and_state
        with pytest.raises(LowVoltageRegime):
            device.injection(x, 0.0)

    def test_injection_partials_match_finite_difference(self, device_and_state):
        device, x = device_and_state
        dg_dV, dg_dVbar, dg_dx = device.injection_partials(x, V0)
        fd_V, fd_Vbar = wirtinger_fd(lambda v: device.injection(x, v), V0)
        assert dg_dV == pytest.approx(fd_V, abs=1e-6)
        assert dg_dVbar == pytest.approx(fd_Vbar, abs=1e-6)
        fd_x = state_fd(lambda s: np.array([device.injection(s, V0)]), x)[0]
        np.testing.assert_allclose(dg_dx, fd_x, atol=1e-6)


class TestDerivative:
    def test_partials_match_finite_difference(self, device_and_state):
        device, x = device_and_state
        dF_dV, dF_dx = device.derivative_partials(x, V0, OMEGA_S)
        fd_x = state_fd(lambda s: device.derivative(s, V0, OMEGA_S), x)
        np.testing.assert_allclose(dF_dx, fd_x, atol=1e-5)
        fd_V, fd_Vbar = wirtinger_fd(lambda v: device.derivative(x, v, OMEGA_S), V0)
        np.testing.assert_allclose(dF_dV, fd_V, atol=1e-5)
        # F 为实函数
        np.testing.assert_allclose(fd_Vbar, np.conj(fd_V), atol=1e-5)

    def test_sg_constant_blocks(self):
        device = SynchronousGenerator(bus=0, params=SG)
        _, dF_dx = device.derivative_partials(np.array([0.45, 0.0, 1.1, 2.3]), V0, OMEGA_S)
        assert dF_dx[EXCITER, EXCITER] == -1 / SG.T_A
        assert dF_dx[INTERNAL, EXCITER] == 1 / SG.T_d0_prime
        assert dF_dx[INTERNAL, INTERNAL] == -(SG.x_d / SG.x_d_prime) / SG.T_d0_prime
        assert dF_dx[ANGLE, SPEED] == OMEGA_S

    def test_gfm_constant_blocks(self):
        device = GridFormingConverter(bus=0, params=GFM)
        _, dF_dx = device.derivative_partials(np.array([0.35, 0.0, 1.07, 0.05]), V0, OMEGA_S)
        assert dF_dx[EXCITER, EXCITER] == -1 / GFM.T_w
        assert dF_dx[INTERNAL, EXCITER] == 1 / GFM.K_i
        assert dF_dx[SPEED, SPEED] == pytest.approx(-(GFM.K_d + GFM.D_vir) / (2 * GFM.H_vir))

    def test_quasi_steady_exciter(self):
        device = SynchronousGenerator(bus=0, params=SG)
        assert device.quasi_steady(V0) == pytest.approx(SG.K_A * (SG.V_ref - abs(V0)))


class TestEquilibrium:
    @pytest.mark.parametrize("S", [0.6 + 0.2j, 0.1 - 0.3j, 0.0 + 0.0j])
    def test_sg_equilibrium_is_stationary(self, S):
        state, params = sg_equilibrium(SG, V0, S)
        device = SynchronousGenerator(bus=0, params=params)
        x = state.to_array()
        assert device.injection(x, V0) == pytest.approx(np.conj(S), abs=1e-12)
        np.testing.assert_allclose(device.derivative(x, V0, OMEGA_S), 0.0, atol=1e-10)
        assert params.P_m == pytest.approx(S.real)

    @pytest.mark.parametrize("S", [0.6 + 0.2j, 0.1 - 0.3j, 0.0 + 0.0j])
    def test_gfm_equilibrium_is_stationary(self, S):
        state, params = gfm_equilibrium(GFM, V0, S)
        device = GridFormingConverter(bus=0, params=params)
        x = state.to_array()
        assert device.injection(x, V0) == pytest.approx(np.conj(S), abs=1e-12)
        np.testing.assert_allclose(device.derivative(x, V0, OMEGA_S), 0.0, atol=1e-10)
        assert state.e_vir_fd == 0.0
        assert params.V_ref == pytest.approx(abs(V0))

    def test_gfm_zero_power_internal_equals_terminal(self):
        state, params = gfm_equilibrium(GfmParams(), 1.0 + 0j, 0j)
        assert state.e_vir == pytest.approx(1.0)
        assert state.delta == pytest.approx(0.0)
        assert params.V_ref == pytest.approx(1.0)


class TestReferenceGain:
    def test_gfm_gain(self):
        device = GridFormingConverter(bus=0, params=GfmParams(K_i=0.1, K_u=1.0))
        assert device.reference_gain() == pytest.approx(10.0)
        assert device.time_constants() == (0.1, 0.02)

    def test_sg_gain(self):
        device = SynchronousGenerator(bus=0, params=SG)
        assert device.reference_gain() == pytest.approx(SG.K_A / SG.T_d0_prime)
        assert device.shunt_term() == pytest.approx(0.5j * (1 / SG.x_d_prime + 1 / SG.x_q))


class TestValidation:
    @pytest.mark.parametrize(
        "changes, field",
        [
            ({"x_d_prime": 0.0}, "x_d_prime"),
            ({"x_d": 0.2}, "x_d"),
            ({"T_d0_prime": -1.0}, "T_d0_prime"),
            ({"T_A": 0.0}, "T_A"),
            ({"K_A": -1.0}, "K_A"),
            ({"H": 0.0}, "H"),
        ],
    )
    def test_sg_rejects(self, changes, field):
        values = dict(x_d=1.8, x_q=1.7, x_d_prime=0.3, T_d0_prime=8.0, K_A=50.0, T_A=0.05)
        values.update(changes)
        with pytest.raises(ValidationError) as exc:
            SgParams(**values)
        assert exc.value.field == field

    def test_gfm_rejects_nonpositive_reactance(self):
        with pytest.raises(ValidationError):
            GfmParams(x_l=0.0)


class TestLoad:
    def test_constant_power_above_break(self):
        S = np.array([0.5 + 0.2j])
        g, dg_dV, dg_dVbar = load_injection(S, np.array([0.95 + 0.1j]))
        assert g[0] == pytest.approx(-(0.5 - 0.2j))
        assert dg_dV[0] == 0 and dg_dVbar[0] == 0

    def test_impedance_below_break(self):
        S = np.array([0.5 + 0.2j])
        V = 0.35 * np.exp(0.4j)
        g, dg_dV, dg_dVbar = load_injection(S, np.array([V]))
        assert g[0] == pytest.approx(-(0.5 - 0.2j) * abs(V) ** 2 / 0.49)
        fd_V, fd_Vbar = wirtinger_fd(lambda v: load_injection(S, np.array([v]))[0][0], V)
        assert dg_dV[0] == pytest.approx(fd_V, abs=1e-6)
        assert dg_dVbar[0] == pytest.approx(fd_Vbar, abs=1e-6)


class TestDispatch:
    def test_device_partials_by_params_type(self):
        state = SgState(0.45, 0.002, 1.1, 2.3)
        partials = device_partials(SG, state, V0, OMEGA_S)
        dF_dV, dF_dx = SynchronousGenerator(bus=0, params=SG).derivative_partials(state.to_array(), V0, OMEGA_S)
        np.testing.assert_allclose(partials.dF_dx, dF_dx)
        np.testing.assert_allclose(partials.dF_dVbar, np.conj(dF_dV))

    def test_quasi_steady_exciter(self):
        assert quasi_steady_exciter(GFM, V0) == pytest.approx(GFM.K_u * (GFM.V_ref - abs(V0)))
        assert quasi_steady_exciter(SG, V0) == pytest.approx(SG.K_A * (SG.V_ref - abs(V0)))
