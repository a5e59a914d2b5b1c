# coding=utf-8
"""单调性分析：符号矩阵、判据、分区、圆盘证书、序关系与 Υ′ 扫描"""

import numpy as np
import pytest

from voltmono.monotone import (
    Regime,
    Verdict,
    check_theorem1,
    classify_regime,
    gershgorin_certificate,
    ordering_check,
    sign_pattern,
    template_match_fraction,
    template_matches,
    template_mismatches,
    upsilon_scan,
    variation_positivity,
    voltage_template,
)
from voltmono.simulation import LINEAR_A, LINEAR_B, LINEAR_C, TimeSeriesBuilder
from voltmono.utils.errors import GridMismatchError, InvalidParameterError


class TestSignPattern:
    def test_diagonal(self):
        sm = sign_pattern(np.diag([-1.0, -1.0]))
        np.testing.assert_array_equal(sm.signs, [[-1, 0], [0, -1]])
        assert sm.to_strings() == [["-", "0"], ["0", "-"]]

    def test_relative_threshold(self):
        sm = sign_pattern(np.array([[-100.0, 1e-3], [-2e-3, 3.0]]), eps_rel=1e-6)
        np.testing.assert_array_equal(sm.signs, [[-1, 1], [-1, 1]])
        assert sm.eps_abs == pytest.approx(1e-4)
        coarse = sign_pattern(np.array([[-100.0, 1e-3], [-2e-3, 3.0]]), eps_rel=1e-3)
        np.testing.assert_array_equal(coarse.signs, [[-1, 0], [0, 1]])

    @pytest.mark.parametrize("eps", [0.0, 1.0, -1e-6, 2.0])
    def test_eps_out_of_range(self, eps):
        with pytest.raises(InvalidParameterError):
            sign_pattern(np.eye(2), eps_rel=eps)

    def test_non_finite(self):
        with pytest.raises(InvalidParameterError):
            sign_pattern(np.array([[np.nan, 0.0], [0.0, 1.0]]))

    def test_equality_by_signs(self):
        assert sign_pattern(np.diag([-1.0, -2.0])) == sign_pattern(np.diag([-5.0, -0.1]))


class TestTemplate:
    def test_single_device(self):
        np.testing.assert_array_equal(voltage_template(1), [[-1, 1], [-1, -1]])

    def test_two_devices(self):
        expected = np.array([
            [-1, 1, 1, 0],
            [1, -1, 0, 1],
            [-1, -1, -1, 0],
            [-1, -1, 0, -1],
        ])
        np.testing.assert_array_equal(voltage_template(2), expected)

    def test_zero_entry_allowed_where_sign_expected(self):
        template = voltage_template(2)
        signs = template.copy()
        signs[0, 1] = 0
        assert template_matches(signs, template)

    def test_mismatch_positions(self):
        template = voltage_template(2)
        signs = template.copy()
        signs[2, 1] = 1
        signs[0, 3] = -1
        assert not template_matches(signs, template)
        assert template_mismatches(signs, template) == [(0, 3), (2, 1)]

    def test_match_fraction(self):
        good = np.array([[-2.0, 1.0], [-3.0, -20.0]])
        bad = np.array([[-2.0, 1.0], [3.0, -20.0]])
        assert template_match_fraction([good, good, bad, good], [0, 1]) == pytest.approx(0.75)
        assert template_match_fraction([], [0, 1]) == 1.0


class TestMonotoneCriterion:
    def test_linear_system_is_monotone(self):
        verdict = check_theorem1(LINEAR_A, LINEAR_B, LINEAR_C)
        assert verdict.verdict == Verdict.INPUT_STATE_OUTPUT_MONOTONE
        assert verdict.is_metzler_state and verdict.input_nonneg and verdict.output_nonneg
        assert verdict.violating_entries == []

    @pytest.mark.parametrize(
        "which, index",
        [("A", (0, 2)), ("A", (1, 0)), ("A", (2, 1)), ("b", 0), ("b", 2), ("c", 1), ("c", 2)],
    )
    def test_single_sign_flip_breaks_verdict(self, which, index):
        A, b, c = LINEAR_A.copy(), LINEAR_B.copy(), LINEAR_C.copy()
        target = {"A": A, "b": b, "c": c}[which]
        target[index] = -target[index]
        verdict = check_theorem1(A, b, c)
        assert verdict.verdict != Verdict.INPUT_STATE_OUTPUT_MONOTONE
        assert len(verdict.violating_entries) == 1

    def test_competitive(self):
        verdict = check_theorem1([[-2.0, -1.0], [-1.0, -2.0]], [1.0, 1.0], [1.0, 0.0])
        assert verdict.verdict == Verdict.COMPETITIVE
        assert not verdict.is_metzler_state

    def test_tolerance_absorbs_noise(self):
        A = np.array([[-1.0, -1e-12], [0.5, -2.0]])
        assert check_theorem1(A, [1.0, 0.0], [0.0, 1.0]).verdict == Verdict.INPUT_OUTPUT_ONLY
        assert check_theorem1(A, [1.0, 0.0], [0.0, 1.0], eps=1e-9).verdict == Verdict.INPUT_STATE_OUTPUT_MONOTONE

    def test_dimension_mismatch(self):
        with pytest.raises(InvalidParameterError):
            check_theorem1(np.eye(3), [1.0, 0.0], [1.0, 0.0, 0.0])


class TestRegime:
    def test_cooperative_weak(self):
        report = classify_regime([[-10.0, 0.5], [0.2, -8.0]])
        assert report.regime == Regime.COOPERATIVE
        assert report.weakly_coupled
        assert report.max_offdiag_ratio == pytest.approx(0.5 / 8.0)

    def test_competitive(self):
        assert classify_regime([[-1.0, -0.5], [-0.2, -1.0]]).regime == Regime.COMPETITIVE

    def test_mixed_strong(self):
        report = classify_regime([[-1.0, 0.5], [-0.7, -1.0]])
        assert report.regime == Regime.MIXED
        assert not report.weakly_coupled

    def test_scalar_is_cooperative(self):
        assert classify_regime([[-3.0]]).regime == Regime.COOPERATIVE


class TestGershgorin:
    def test_certified(self):
        cert = gershgorin_certificate([[-3.0, 1.0], [0.5, -2.0]])
        assert cert.certified_stable
        assert cert.spectral_abscissa < 0
        assert cert.margin == pytest.approx(1.5)

    def test_not_certified_but_stable(self):
        cert = gershgorin_certificate([[-1.0, 3.0], [0.0, -1.0]])
        assert not cert.certified_stable
        assert cert.spectral_abscissa == pytest.approx(-1.0)

    def test_soundness_on_random_matrices(self):
        rng = np.random.default_rng(0)
        certified = 0
        for _ in range(200):
            J = rng.normal(size=(4, 4)) - np.diag(rng.uniform(2.0, 10.0, size=4))
            cert = gershgorin_certificate(J)
            if cert.certified_stable:
                certified += 1
                assert cert.spectral_abscissa < 0
        assert certified > 0


def series(times, **signals):
    builder = TimeSeriesBuilder(tuple(signals))
    for k, t in enumerate(times):
        builder.append(t, [signals[name][k] for name in signals])
    return builder.build()


class TestOrdering:
    def test_holds(self, linear_demo):
        lo, hi = linear_demo
        report = ordering_check(hi, lo, ["x1", "x2", "x3", "y"], tol=1e-9)
        assert report.holds
        assert report.first_violation_time is None
        assert report.samples == len(lo.times)

    def test_reports_first_violation(self):
        t = [0.0, 0.1, 0.2, 0.3]
        hi = series(t, a=[1.0, 1.0, 0.5, 1.0])
        lo = series(t, a=[0.0, 0.9, 0.9, 0.95])
        report = ordering_check(hi, lo, ["a"], tol=1e-6)
        assert not report.holds
        assert report.first_violation_time == pytest.approx(0.2)
        assert report.worst_violation == pytest.approx(0.4)
        assert report.worst_signal == "a"

    def test_window(self):
        t = [0.0, 0.1, 0.2, 0.3]
        hi = series(t, a=[1.0, 1.0, 0.5, 1.0])
        lo = series(t, a=[0.0, 0.9, 0.9, 0.95])
        assert ordering_check(hi, lo, ["a"], window=(0.25, 1.0)).holds

    def test_grid_mismatch(self):
        a = series([0.0, 0.1], a=[0.0, 0.0])
        b = series([0.0, 0.2], a=[0.0, 0.0])
        with pytest.raises(GridMismatchError):
            ordering_check(a, b, ["a"])


class TestVariation:
    def test_metzler_with_positive_input_stays_positive(self):
        times = np.linspace(0.0, 5.0, 51)
        report = variation_positivity(times, [LINEAR_A] * 51, [LINEAR_B] * 51, dv=[1.0])
        assert report.positive
        assert report.trajectory.shape == (51, 3)
        assert np.all(report.trajectory[-1] > 0)

    def test_non_metzler_goes_negative(self):
        A = np.array([[-1.0, -5.0], [0.0, -1.0]])
        times = np.linspace(0.0, 3.0, 31)
        report = variation_positivity(times, [A] * 31, [np.array([0.0, 1.0])] * 31, dv=[1.0])
        assert not report.positive
        assert report.min_component < 0

    def test_negative_input_rejected(self):
        with pytest.raises(InvalidParameterError):
            variation_positivity([0.0, 1.0], [LINEAR_A] * 2, [LINEAR_B] * 2, dv=[-1.0])

    def test_snapshot_count_checked(self):
        with pytest.raises(InvalidParameterError):
            variation_positivity([0.0, 1.0, 2.0], [LINEAR_A] * 2, [LINEAR_B] * 2, dv=[1.0])


class TestUpsilon:
    @pytest.fixture(scope="class")
    def scan(self, smib_eq):
        return upsilon_scan(smib_eq, bus=1, shed_v1=0.2, shed_v2=0.1, t_samples=[0.0, 0.1, 0.2], sigma_steps=20)

    def test_positive_and_lower_bound(self, scan):
        assert scan.positive
        assert scan.upsilon_prime.shape == (3, 1, 21)
        assert scan.integral_lower_bound <= float(np.min(scan.integral_values)) + 1e-12
        assert np.all(scan.output_gap > 0)

    def test_integral_matches_output_gap(self, scan):
        np.testing.assert_allclose(scan.integral_values, scan.output_gap, rtol=1e-3)
        assert scan.identity_error() < 1e-3 * float(np.max(scan.output_gap))

    def test_to_dict(self, scan):
        data = scan.to_dict()
        assert data["output_buses"] == ["2"]
        assert data["sigma_steps"] == 20
        assert len(data["upsilon_prime"]) == 3

    def test_ordering_of_shed_amounts(self, smib_eq):
        with pytest.raises(InvalidParameterError):
            upsilon_scan(smib_eq, bus=1, shed_v1=0.1, shed_v2=0.2, t_samples=[0.0])

    def test_empty_times(self, smib_eq):
        with pytest.raises(InvalidParameterError):
            upsilon_scan(smib_eq, bus=1, shed_v1=0.2, shed_v2=0.1, t_samples=[])
