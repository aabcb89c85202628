"""Spectral classification, convergence speed, and fixed-point reconstruction."""

import math

import numpy as np
import pytest

from channellab import (
    DensityMatrix,
    VERDICT_ERGODIC_NOT_MIXING,
    VERDICT_MIXING,
    VERDICT_NOT_ERGODIC,
    analyze,
    apply,
    calibrate_speed_constant,
    convergence_bound,
    estimate_rate,
    peripheral_normality_check,
    polar_fixed_point,
    purely_ergodic_shortcut,
    to_superoperator,
)
from channellab.opalg import trace_norm
from channellab.spectral import default_fit_window, report_to_payload
from channellab.zoo import PAULI_Z, build_named, example_ergodic_channel


def _peripheral_set_matches(report, expected):
    """Compare the peripheral multiset against `expected` ignoring order."""
    got = sorted(report.peripheral, key=lambda z: (round(z.real, 6), round(z.imag, 6)))
    want = sorted(expected, key=lambda z: (round(z.real, 6), round(z.imag, 6)))
    assert len(got) == len(want)
    assert max(abs(g - w) for g, w in zip(got, want)) <= 1e-9


class TestVerdicts:
    def test_depolarizing_kappa_and_verdict(self, spectral_reports):
        for p in (0.25, 0.5):
            report = spectral_reports[f"depolarizing(p={p})"]
            assert report.verdict == VERDICT_MIXING
            assert report.kappa == pytest.approx(1.0 - p, abs=1e-10)
            assert report.eigenvalue_one_multiplicity == 1
            spectrum = np.sort(report.spectrum.real)
            assert np.abs(spectrum - np.sort([1.0, 1 - p, 1 - p, 1 - p])).max() <= 1e-9

    def test_amplitude_damping_kappa(self, spectral_reports):
        for gamma in (0.3, 0.7):
            report = spectral_reports[f"amplitude-damping(gamma={gamma})"]
            assert report.verdict == VERDICT_MIXING
            assert report.kappa == pytest.approx(math.sqrt(1.0 - gamma), abs=1e-10)

    def test_dephasing_degenerate_fixed_space(self, spectral_reports):
        report = spectral_reports["dephasing(p=0.3)"]
        assert report.verdict == VERDICT_NOT_ERGODIC
        assert report.eigenvalue_one_multiplicity == 2
        spectrum = np.sort(report.spectrum.real)
        assert np.abs(spectrum - np.sort([1.0, 1.0, 0.4, 0.4])).max() <= 1e-9
        assert len(report.fixed_point_basis) == 2
        assert report.fixed_point_purity is None

    def test_unitary_conjugation_not_ergodic(self, spectral_reports):
        report = spectral_reports["unitary(theta=1.0472)"]
        assert report.verdict == VERDICT_NOT_ERGODIC
        assert report.eigenvalue_one_multiplicity == 2
        theta = math.pi / 3.0
        _peripheral_set_matches(
            report, [1.0, 1.0, np.exp(1j * theta), np.exp(-1j * theta)]
        )

    def test_population_flip_is_ergodic_not_mixing(self, spectral_reports):
        report = spectral_reports["example-ergodic"]
        assert report.verdict == VERDICT_ERGODIC_NOT_MIXING
        assert report.kappa == pytest.approx(0.0, abs=1e-12)
        _peripheral_set_matches(report, [1.0, -1.0])

    def test_shift_channel_is_mixing_with_zero_kappa(self, spectral_reports):
        report = spectral_reports["example-mixing"]
        assert report.verdict == VERDICT_MIXING
        assert report.kappa == pytest.approx(0.0, abs=1e-12)

    def test_expected_verdicts_hold_for_whole_catalog(self, zoo_entries, spectral_reports):
        for spec, _ in zoo_entries:
            if spec.expected_verdict is None:
                continue
            assert spectral_reports[spec.label].verdict == spec.expected_verdict, spec.label


class TestFixedPoints:
    def test_depolarizing_fixes_maximally_mixed(self, spectral_reports):
        report = spectral_reports["depolarizing(p=0.5)"]
        assert np.abs(report.fixed_points[0].matrix - np.eye(2) / 2.0).max() <= 1e-10
        assert report.fixed_point_purity == pytest.approx(0.5, abs=1e-10)

    def test_amplitude_damping_fixes_ground_state(self, spectral_reports):
        report = spectral_reports["amplitude-damping(gamma=0.3)"]
        assert np.abs(report.fixed_points[0].matrix - np.diag([1.0, 0.0])).max() <= 1e-10
        assert report.fixed_point_purity == pytest.approx(1.0, abs=1e-10)

    def test_fixed_points_are_actually_fixed(self, zoo_entries, spectral_reports):
        for spec, channel in zoo_entries:
            report = spectral_reports[spec.label]
            for dm in report.fixed_points:
                assert trace_norm(apply(channel, dm).matrix - dm.matrix) <= 1e-8, spec.label


class TestConvergenceBound:
    def test_template_values(self, spectral_reports):
        report = spectral_reports["depolarizing(p=0.5)"]
        assert convergence_bound(report, 0, 2.0) == pytest.approx(0.0)
        assert convergence_bound(report, 3, 2.0) == pytest.approx(2.0 * 3**2 * 0.5**3)

    def test_rejects_non_mixing(self, spectral_reports):
        with pytest.raises(ValueError, match="mixing"):
            convergence_bound(spectral_reports["example-ergodic"], 5, 1.0)

    def test_rejects_negative_n(self, spectral_reports):
        with pytest.raises(ValueError, match="nonnegative"):
            convergence_bound(spectral_reports["depolarizing(p=0.5)"], -1, 1.0)

    def test_zero_kappa_bound_vanishes(self, spectral_reports):
        report = spectral_reports["example-mixing"]
        assert convergence_bound(report, 5, 10.0) == pytest.approx(0.0)


class TestCalibration:
    def test_depolarizing_first_step_constant(self, spectral_reports):
        p = 0.25
        c = build_named("depolarizing", p=p)
        report = spectral_reports[f"depolarizing(p={p})"]
        rho0 = DensityMatrix.basis_state(2, 0)
        # one step moves |0><0| to distance (1-p) from I/2, so c1 = d1/kappa = 1
        c1 = calibrate_speed_constant(c, report, rho0)
        assert c1 == pytest.approx(1.0, abs=1e-10)

    def test_rejects_zero_kappa(self, spectral_reports):
        c = build_named("example-mixing")
        with pytest.raises(ValueError, match="finite-step"):
            calibrate_speed_constant(
                c, spectral_reports["example-mixing"], DensityMatrix.basis_state(3, 2)
            )

    def test_rejects_non_mixing(self, spectral_reports):
        c = example_ergodic_channel()
        with pytest.raises(ValueError, match="mixing"):
            calibrate_speed_constant(
                c, spectral_reports["example-ergodic"], DensityMatrix.basis_state(2, 0)
            )


class TestRateEstimation:
    def test_depolarizing_rate_matches_kappa(self):
        # the orbit from |0><0| decays exactly like kappa^n; cut the window
        # at n=30 so the distances stay far above floating-point noise
        c = build_named("depolarizing", p=0.5)
        estimate = estimate_rate(c, DensityMatrix.basis_state(2, 0), n_min=5, n_max=30)
        assert estimate.kappa == pytest.approx(0.5, abs=1e-10)
        assert estimate.empirical_rate == pytest.approx(0.5, abs=1e-6)
        assert estimate.fit_residual <= 1e-5

    def test_amplitude_damping_rate_near_kappa(self):
        # a state with coherences excites the slowest mode (decay kappa^n)
        c = build_named("amplitude-damping", gamma=0.3)
        plus = DensityMatrix.pure(np.array([1.0, 1.0]) / np.sqrt(2.0))
        estimate = estimate_rate(c, plus)
        assert estimate.n_range == default_fit_window(2)
        assert abs(estimate.empirical_rate - estimate.kappa) <= 0.05 * estimate.kappa

    def test_population_only_state_shows_squared_rate(self):
        # from |1><1| the orbit has no coherences, so the visible decay is
        # the population mode (1 - gamma)^n, strictly faster than kappa^n
        c = build_named("amplitude-damping", gamma=0.3)
        estimate = estimate_rate(c, DensityMatrix.basis_state(2, 1))
        assert estimate.empirical_rate == pytest.approx(0.7, abs=1e-6)

    def test_rejects_finite_step_convergence(self):
        c = build_named("example-mixing")
        with pytest.raises(ValueError, match="finitely many steps"):
            estimate_rate(c, DensityMatrix.basis_state(3, 2))

    def test_rejects_bad_window(self):
        c = build_named("depolarizing", p=0.5)
        with pytest.raises(ValueError, match="window"):
            estimate_rate(c, DensityMatrix.basis_state(2, 0), n_min=10, n_max=10)

    def test_rejects_converged_window(self):
        # far beyond the horizon where distances hit the floor
        c = build_named("depolarizing", p=0.5)
        with pytest.raises(ValueError, match="usable distances"):
            estimate_rate(c, DensityMatrix.basis_state(2, 0), n_min=200, n_max=260)


class TestShortcut:
    def test_pure_fixed_point_implies_mixing(self, spectral_reports):
        result = purely_ergodic_shortcut(spectral_reports["amplitude-damping(gamma=0.3)"])
        assert result.applicable
        assert result.verdict == VERDICT_MIXING
        assert result.consistent
        assert result.purity == pytest.approx(1.0, abs=1e-10)

    def test_mixed_fixed_point_not_applicable(self, spectral_reports):
        result = purely_ergodic_shortcut(spectral_reports["depolarizing(p=0.5)"])
        assert not result.applicable
        assert result.verdict is None
        assert result.consistent

    def test_rejects_degenerate_fixed_space(self, spectral_reports):
        with pytest.raises(ValueError, match="ergodic"):
            purely_ergodic_shortcut(spectral_reports["dephasing(p=0.3)"])


class TestPeripheralStructure:
    def test_population_flip_peripheral_vectors_normal(self, spectral_reports):
        c = example_ergodic_channel()
        records = peripheral_normality_check(c, spectral_reports["example-ergodic"])
        assert len(records) == 2
        for record in records:
            assert record.defect <= 1e-9

    def test_ergodic_catalog_channels_have_normal_peripherals(self, zoo_entries, spectral_reports):
        for spec, channel in zoo_entries:
            report = spectral_reports[spec.label]
            if report.verdict == VERDICT_NOT_ERGODIC:
                continue
            for record in peripheral_normality_check(channel, report):
                assert record.defect <= 1e-8, spec.label

    def test_rejects_degenerate_fixed_space(self, spectral_reports):
        c = build_named("dephasing", p=0.3)
        with pytest.raises(ValueError, match="ergodic"):
            peripheral_normality_check(c, spectral_reports["dephasing(p=0.3)"])


class TestPolarFixedPoint:
    def test_spin_flip_eigenvector_reconstructs_maximally_mixed(self):
        # the population flip sends sigma_z -> -sigma_z; both polar factors are I/2
        c = example_ergodic_channel()
        rho, sigma = polar_fixed_point(c, PAULI_Z, -1.0)
        assert np.abs(rho.matrix - np.eye(2) / 2.0).max() <= 1e-10
        assert np.abs(sigma.matrix - np.eye(2) / 2.0).max() <= 1e-10

    def test_unit_eigenvalue_returns_unique_fixed_point(self, zoo_entries, spectral_reports):
        for spec, channel in zoo_entries:
            report = spectral_reports[spec.label]
            if report.verdict == VERDICT_NOT_ERGODIC:
                continue
            fixed = report.fixed_points[0].matrix
            rho, sigma = polar_fixed_point(channel, fixed, 1.0)
            assert np.abs(rho.matrix - fixed).max() <= 1e-8, spec.label
            assert np.abs(sigma.matrix - fixed).max() <= 1e-8, spec.label

    def test_rejects_non_eigenvector(self):
        c = example_ergodic_channel()
        with pytest.raises(ValueError, match="eigenpair"):
            polar_fixed_point(c, np.array([[0.0, 1.0], [1.0, 0.0]]), -1.0)

    def test_rejects_non_peripheral_eigenvalue(self):
        c = example_ergodic_channel()
        with pytest.raises(ValueError, match="peripheral"):
            polar_fixed_point(c, np.array([[0.0, 1.0], [0.0, 0.0]]), 0.0)


class TestPayload:
    def test_payload_schema_and_values(self, spectral_reports):
        payload = report_to_payload(spectral_reports["depolarizing(p=0.25)"])
        assert set(payload) == {
            "spectrum",
            "peripheral",
            "kappa",
            "verdict",
            "fixed_points",
            "purity",
            "eigenvalue_one_multiplicity",
            "near_cluster_boundary",
            "max_residual",
        }
        assert payload["verdict"] == VERDICT_MIXING
        assert payload["kappa"] == pytest.approx(0.75)
        assert all(len(pair) == 2 for pair in payload["spectrum"])
        assert len(payload["fixed_points"]) == 1

    def test_catalog_reports_flag_no_boundary_cases(self, spectral_reports):
        # the fixtures are chosen away from tolerance boundaries
        for label, report in spectral_reports.items():
            assert report.max_residual <= 1e-8, label


def test_analyze_on_identity_channel():
    from channellab import KrausChannel

    report = analyze(to_superoperator(KrausChannel(2, [np.eye(2)])))
    assert report.verdict == VERDICT_NOT_ERGODIC
    assert report.eigenvalue_one_multiplicity == 4
    assert report.kappa == pytest.approx(0.0, abs=1e-12)
