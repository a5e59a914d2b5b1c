# coding=utf-8
"""算例文件：解析、校验、基准换算与序列化"""

import numpy as np
import pytest

from voltmono.cases import (
    build_system,
    bundled_cases,
    case_hash,
    load_bundled,
    parse_case,
    parse_case_text,
    resolve_case,
    serialize_case,
)
from voltmono.devices import GridFormingConverter, SynchronousGenerator
from voltmono.utils.errors import ParseError, UnknownTargetError, ValidationError

MINIMAL = """
format: voltmono-case/1
name: minimal
system: {base_mva: 100.0, slack_bus: 1}
buses: [1, 2]
branches:
  - {from: 1, to: 2, x: 0.5}
devices:
  - kind: sg
    bus: 1
    params: {x_d: 1.8, x_q: 1.7, x_d_prime: 0.3, T_d0_prime: 8.0, K_A: 50.0, T_A: 0.05, H: 3.5}
loads:
  - {bus: 2, p: 0.5, q: 0.2}
"""


def with_device(params: str, extra: str = "", kind: str = "sg") -> str:
    return f"""
format: voltmono-case/1
system: {{base_mva: 100.0, slack_bus: 1}}
buses: [1, 2]
branches:
  - {{from: 1, to: 2, x: 0.5}}
devices:
  - kind: {kind}
    bus: 1
{extra}    params: {params}
"""


class TestParse:
    def test_minimal(self):
        case = parse_case_text(MINIMAL)
        assert case.name == "minimal"
        assert case.bus_numbers() == [1, 2]
        assert case.system.frequency_hz == 60.0
        assert case.devices[0].params.D == 0.0
        assert case.branches[0].r == 0.0 and case.branches[0].tap == 1.0
        assert case.loads[0].model == "constant_power"

    def test_bundled(self):
        assert {"smib", "case39_sg", "case39_gfm"} <= set(bundled_cases())
        with pytest.raises(FileNotFoundError):
            load_bundled("case9")

    def test_case39_gfm_devices(self, case39_gfm):
        assert len(case39_gfm.buses) == 39
        assert len(case39_gfm.devices) == 10
        gfm = [d for d in case39_gfm.devices if d.kind == "gfm"]
        assert [d.bus for d in gfm] == [30, 31, 32, 33]
        assert all(d.params.K_i == pytest.approx(0.1) for d in gfm)
        assert [s.name for s in case39_gfm.scenarios] == ["base", "vref_step", "shed_100", "shed_200", "fault_006"]

    def test_heavy_load_at_bus_four(self, case39_gfm):
        load = next(ld for ld in case39_gfm.loads if ld.bus == 4)
        assert complex(load.p, load.q) == pytest.approx(5 + 4j)

    def test_shed_amounts_converted_to_per_unit(self, case39_gfm):
        assert case39_gfm.scenario("shed_100").events[0].dq == pytest.approx(1.0)
        assert case39_gfm.scenario("shed_200").events[0].dq == pytest.approx(2.0)

    def test_unknown_scenario(self, smib_case):
        with pytest.raises(UnknownTargetError):
            smib_case.scenario("missing")
        with pytest.raises(UnknownTargetError):
            smib_case.bus_id(9)


class TestErrors:
    def test_missing_required_parameter(self):
        text = with_device("{x_d: 1.8, x_q: 1.7, x_d_prime: 0.3, K_A: 50.0, T_A: 0.05, H: 3.5}")
        with pytest.raises(ValidationError) as exc:
            parse_case_text(text)
        assert exc.value.field == "devices[0].params.T_d0_prime"
        assert exc.value.code == "VALIDATION_ERROR"

    def test_unknown_parameter(self):
        text = with_device("{x_d: 1.8, x_q: 1.7, x_d_prime: 0.3, T_d0_prime: 8.0, K_A: 50.0, T_A: 0.05, H: 3.5, K_E: 1.0}")
        with pytest.raises(ValidationError) as exc:
            parse_case_text(text)
        assert exc.value.field == "devices[0].params.K_E"

    def test_yaml_syntax_error_has_line(self):
        with pytest.raises(ParseError) as exc:
            parse_case_text("format: voltmono-case/1\nbuses: [1, 2\nbranches: []\n")
        assert exc.value.line >= 2
        assert exc.value.code == "PARSE_ERROR"

    @pytest.mark.parametrize("text", ["name: x\nbuses: [1]\n", "format: voltmono-case/2\n", "- 1\n- 2\n"])
    def test_header_required(self, text):
        with pytest.raises(ParseError):
            parse_case_text(text)

    def test_event_on_missing_bus(self):
        text = MINIMAL + """
scenarios:
  - name: s
    t_end: 1.0
    events:
      - {t: 0.1, kind: load_shed, bus: 7, dq: 0.1}
"""
        with pytest.raises(ValidationError) as exc:
            parse_case_text(text)
        assert exc.value.field == "scenarios.s"

    def test_unknown_event_kind(self):
        text = MINIMAL + """
scenarios:
  - name: s
    t_end: 1.0
    events:
      - {t: 0.1, kind: trip, bus: 2}
"""
        with pytest.raises(ValidationError):
            parse_case_text(text)

    def test_slack_needs_device(self):
        with pytest.raises(ValidationError) as exc:
            parse_case_text(MINIMAL.replace("slack_bus: 1", "slack_bus: 2"))
        assert exc.value.field == "system.slack_bus"

    def test_missing_file(self, tmp_path):
        with pytest.raises(FileNotFoundError):
            parse_case(tmp_path / "absent.yaml")


class TestUnits:
    def test_machine_base_conversion(self):
        text = with_device(
            "{x_d: 1.8, x_q: 1.7, x_d_prime: 0.3, T_d0_prime: 8.0, K_A: 50.0, T_A: 0.05, H: 3.5, D: 1.0}",
            extra="    mbase: 200.0\n",
        )
        params = parse_case_text(text).devices[0].params
        assert params.x_d == pytest.approx(0.9)
        assert params.x_d_prime == pytest.approx(0.15)
        assert params.H == pytest.approx(7.0)
        assert params.D == pytest.approx(2.0)
        assert params.T_d0_prime == pytest.approx(8.0)

    def test_megawatt_loads(self):
        text = MINIMAL.replace("{bus: 2, p: 0.5, q: 0.2}", "{bus: 2, p_mw: 50.0, q_mvar: 100.0}")
        load = parse_case_text(text).loads[0]
        assert load.p == pytest.approx(0.5)
        assert load.q == pytest.approx(1.0)

    def test_default_reported_when_not_quiet(self, capsys):
        text = with_device("{K_i: 0.1, K_d: 5.0, T_w: 0.02, K_u: 1.0, H_vir: 5.0}", kind="gfm")
        case = parse_case_text(text, quiet=False)
        assert case.devices[0].params.x_l == pytest.approx(0.1)
        out = capsys.readouterr().out
        assert "devices[0].params.x_l 未给出" in out

    def test_default_silent_when_quiet(self, capsys):
        text = with_device("{K_i: 0.1, K_d: 5.0, T_w: 0.02, K_u: 1.0, H_vir: 5.0}", kind="gfm")
        parse_case_text(text)
        assert capsys.readouterr().out == ""


class TestSerialize:
    @pytest.mark.parametrize("name", ["smib", "case39_sg", "case39_gfm"])
    def test_roundtrip_bundled(self, name):
        case = load_bundled(name)
        again = parse_case_text(serialize_case(case))
        assert again == case
        assert case_hash(again) == case_hash(case)

    def test_hash_tracks_content(self, smib_case):
        changed = smib_case.with_load(2, 0.6, 0.2)
        assert case_hash(changed) != case_hash(smib_case)

    def test_resolve_by_path_or_name(self, smib_case, tmp_path):
        path = tmp_path / "copy.yaml"
        path.write_text(serialize_case(smib_case), encoding="utf-8")
        assert resolve_case(str(path)) == smib_case
        assert resolve_case("smib") == smib_case


class TestEdits:
    def test_scale_device_params(self, case39_gfm):
        scaled = case39_gfm.scale_device_params({"K_A": 0.5, "K_u": 0.5})
        for old, new in zip(case39_gfm.devices, scaled.devices):
            if old.kind == "sg":
                assert new.params.K_A == pytest.approx(0.5 * old.params.K_A)
            else:
                assert new.params.K_u == pytest.approx(0.5 * old.params.K_u)

    def test_with_device_params(self, smib_case):
        changed = smib_case.with_device_params(T_A=0.01, T_w=0.5)
        assert changed.devices[0].params.T_A == 0.01
        assert smib_case.devices[0].params.T_A == 0.05


class TestBuildSystem:
    def test_smib(self, smib_case):
        system, pf = build_system(smib_case)
        assert system.network.n == 2
        assert isinstance(system.devices[0], SynchronousGenerator)
        assert system.devices[0].bus == 0
        np.testing.assert_allclose(system.load_power, [0.0, 0.5 + 0.1j])
        assert system.omega_s == pytest.approx(2 * np.pi * 60)
        assert pf.pv_buses == ()
        np.testing.assert_allclose(pf.p_spec, [0.0, -0.5])

    def test_case39_gfm_devices(self, case39_gfm):
        system, pf = build_system(case39_gfm)
        kinds = [type(d) for d in system.devices]
        assert kinds.count(GridFormingConverter) == 4
        assert len(pf.pv_buses) == 9
        assert system.layout.labels[:4] == ("delta@30", "omega@30", "evir@30", "evirfd@30")

    def test_constant_impedance_load_enters_admittance(self):
        text = MINIMAL.replace("{bus: 2, p: 0.5, q: 0.2}", "{bus: 2, p: 0.5, q: 0.2, model: constant_impedance}")
        system, _ = build_system(parse_case_text(text))
        plain, _ = build_system(parse_case_text(MINIMAL.replace("loads:\n  - {bus: 2, p: 0.5, q: 0.2}\n", "")))
        assert system.network.Y[1, 1] - plain.network.Y[1, 1] == pytest.approx(0.5 - 0.2j)
        assert system.load_power[1] == 0
