import json
import math

import numpy as np
import pytest

from conftest import rel_err

from cavsqueeze import (
    CavityAtomParams,
    EnsembleSpec,
    classify_regime,
    curvature_optimum,
    design_report,
    full_curve_minimum,
    golden_section_min,
    scattering_optimum,
)
from cavsqueeze.design import DesignTargets

WORKED = dict(g_hz=0.4e6, kappa_hz=1e6, gamma_hz=6.07e6, delta_over_gamma=500.0)


class TestGoldenSection:
    def test_quadratic(self):
        x, fx = golden_section_min(lambda x: (x - 3.7) ** 2 + 1.0, 0.0, 10.0)
        assert x == pytest.approx(3.7, abs=1e-7)
        assert fx == pytest.approx(1.0, abs=1e-12)

    def test_cosine(self):
        x, _ = golden_section_min(math.cos, 2.0, 4.5)
        assert x == pytest.approx(math.pi, abs=1e-7)


class TestCurvatureOptimum:
    def test_closed_form_values_reference_spin(self):
        q_curv, sigma_curv = curvature_optimum(1e4)
        assert q_curv == pytest.approx(56.968, rel=1e-4)
        assert sigma_curv == pytest.approx(0.021942, rel=1e-4)

    def test_matches_numerical_minimizer(self):
        # golden-section oracle on the two-term form
        for s in (100.0, 1e4, 1e6):
            q_curv, sigma_curv = curvature_optimum(s)
            q_num, val_num = golden_section_min(
                lambda q: 1.0 / q + q**4 / (24.0 * s * s), 0.5 * q_curv, 2.0 * q_curv
            )
            assert rel_err(q_num, q_curv) < 1e-6
            assert rel_err(val_num, sigma_curv) < 1e-6

    def test_algebraic_identity(self):
        q_curv, sigma_curv = curvature_optimum(777.0)
        assert sigma_curv == pytest.approx(1.25 / q_curv, rel=1e-12)

    def test_requires_unit_spin(self):
        with pytest.raises(ValueError):
            curvature_optimum(0.5)


class TestScatteringOptimum:
    def test_reference_values(self):
        q_scatt, r_opt, sigma_sq = scattering_optimum(1e4, 0.1)
        assert q_scatt == pytest.approx(54.772, rel=1e-4)
        assert r_opt == pytest.approx(0.013693, rel=1e-4)
        assert sigma_sq == pytest.approx(0.036515, rel=1e-4)

    def test_identity_q_equals_4_s_eta_r(self):
        for s, eta in [(1e4, 0.1), (100.0, 2.0), (1e6, 1e-3)]:
            q_scatt, r_opt, _ = scattering_optimum(s, eta)
            assert rel_err(q_scatt, 4.0 * s * eta * r_opt) < 1e-12

    def test_unbounded_improvement(self):
        _, _, big = scattering_optimum(1e3, 0.1)
        _, _, small = scattering_optimum(1e12, 0.1)
        assert small < 1e-3 * big

    def test_warns_when_r_opt_large(self):
        with pytest.warns(RuntimeWarning, match="r_opt"):
            scattering_optimum(10.0, 0.1)

    def test_rejects_nonpositive(self):
        with pytest.raises(ValueError):
            scattering_optimum(10.0, 0.0)


class TestClassifyRegime:
    def test_reference_points(self):
        assert classify_regime(1e4, 0.001).regime == "scattering"
        assert classify_regime(1e4, 1.0).regime == "curvature"

    def test_boundary_convention(self):
        s = 1e4
        eta_boundary = s ** (-0.2)
        cls = classify_regime(s, eta_boundary)
        assert cls.s_eta5 == pytest.approx(1.0, rel=1e-10)
        assert cls.regime == "curvature"
        assert cls.near_boundary

    def test_agrees_with_direct_floor_comparison(self):
        # outside a factor-3 band in eta around the S eta^5 = 1 boundary the
        # rule must agree with comparing the two floors directly
        total = agree = banded = 0
        for s in np.geomspace(1e2, 1e6, 13):
            for eta in np.geomspace(1e-4, 10.0, 13):
                cls = classify_regime(s, eta)
                direct = "curvature" if cls.sigma_curv_sq <= cls.sigma_scatt_sq else "scattering"
                total += 1
                if cls.regime == direct:
                    agree += 1
                elif cls.near_boundary:
                    banded += 1  # logged, not failed
                else:
                    raise AssertionError(f"disagree outside band: S={s}, eta={eta}")
        assert (agree + banded) / total == 1.0
        assert agree / total >= 0.95


class TestFullCurveMinimum:
    def test_floors_respected_where_asymptotics_hold(self):
        # the closed-form floors are asymptotic: check them only where the
        # optimum Q is large enough (Q* >= 15) for the expansions to apply
        for s in np.geomspace(1e2, 1e6, 5):
            for eta in np.geomspace(1e-4, 10.0, 6):
                q_curv, sigma_curv = curvature_optimum(max(s, 1.0))
                q_scatt = math.sqrt(3.0 * s * eta)
                sigma_scatt = 2.0 / q_scatt
                floor = max(sigma_curv, sigma_scatt)
                binding_q = q_curv if sigma_curv >= sigma_scatt else q_scatt
                if binding_q < 15.0:
                    continue
                _, sigma_full = full_curve_minimum(s, eta)
                assert sigma_full >= floor * (1.0 - 0.05), (s, eta)

    def test_asymptotic_location_agreement(self):
        # full-curve minimum vs asymptotic Q_scatt at the reference point
        q_full, _ = full_curve_minimum(1e4, 0.1)
        q_scatt = math.sqrt(3.0 * 1e4 * 0.1)
        assert abs(q_full - q_scatt) / q_scatt <= 0.15


class TestDesignReport:
    def _system(self, s=1e4):
        return EnsembleSpec(total_spin=s), CavityAtomParams.from_hz(**WORKED)

    def test_worked_example(self):
        ensemble, params = self._system()
        report = design_report(ensemble, params, pulse_time=400e-6)
        # recommended shearing close to 50 for these parameters
        assert report.q_recommended == pytest.approx(50.0, rel=0.15)
        # saturation bound: kappa t around 400 at eps <= 1e-5 and Q = 50
        kt = report.t_constraints["kappa_t_min_saturation"]
        kt_at_50 = kt * 50.0 / report.q_recommended
        assert kt_at_50 == pytest.approx(400.0, rel=0.10)
        assert report.limiting_regime == "scattering"
        assert not report.spin_shortening_flag
        # p0 round-trips through Q = S p0 (2 Omega/kappa)^2
        q_back = ensemble.total_spin * report.p0_required * (
            2.0 * params.omega_shift / params.kappa) ** 2
        assert rel_err(q_back, report.q_recommended) < 1e-12

    def test_rejects_zero_shearing_target(self):
        ensemble, params = self._system()
        with pytest.raises(ValueError, match="no shearing requested"):
            design_report(ensemble, params, 1e-4, DesignTargets(q_target=0.0))

    def test_explicit_target_used(self):
        ensemble, params = self._system()
        report = design_report(ensemble, params, 1e-4, DesignTargets(q_target=20.0))
        assert report.q_recommended == 20.0
        assert report.r_recommended == pytest.approx(
            20.0 / (4.0 * 1e4 * params.eta), rel=1e-12)

    def test_report_serializes_with_provenance(self):
        ensemble, params = self._system()
        report = design_report(ensemble, params, 400e-6)
        payload = report.as_dict()
        text = json.dumps(payload)  # must be JSON-clean
        assert "schema_version" in payload["provenance"]
        assert payload["provenance"]["params"]["gamma_rad_s"] == params.gamma
        assert payload["validity"]["flags"]
        assert payload["t_constraints"]["kappa_t_actual"] == pytest.approx(
            params.kappa * 400e-6, rel=1e-12)

    def test_regime_flags_surface_not_raise(self):
        # hopeless parameters must produce a report with failing flags
        ensemble = EnsembleSpec(total_spin=10.0)
        params = CavityAtomParams.from_hz(g_hz=1e3, kappa_hz=1e6, gamma_hz=6.07e6,
                                          delta_over_gamma=5.0)
        report = design_report(ensemble, params, 1e-9)
        assert not report.validity.all_ok

    def test_shortening_flag_fires(self):
        # weak collective cooperativity pushes the optimum r beyond 0.1
        ensemble = EnsembleSpec(total_spin=100.0)
        params = CavityAtomParams.from_hz(g_hz=0.05e6, kappa_hz=1e6, gamma_hz=6.07e6,
                                          delta_over_gamma=500.0)
        with pytest.warns(RuntimeWarning):
            report = design_report(ensemble, params, 400e-6)
        assert report.spin_shortening_flag
