import math

import numpy as np
import pytest

import geofreq as gf
from geofreq.circuits import (
    BUILTIN_SCENARIOS,
    DEFAULT_DIODE_POLY,
    RcParams,
    RlcParams,
    ThirdOrderParams,
    TunnelDiodeParams,
    diode_conductance,
    diode_current,
)


class TestRc:
    def test_unit_eigenvalue(self):
        m = gf.build_rc(RcParams(1.0, 1.0, 1.0))
        assert m.A[0, 0] == -1.0

    def test_product_invariance(self):
        m = gf.build_rc(RcParams(2.0, 0.5, 1.0))
        assert m.A[0, 0] == -1.0

    def test_rho_equals_eigenvalue_along_trajectory(self):
        for R, C in [(1.0, 1.0), (2.0, 0.5), (0.3, 4.0)]:
            p = RcParams(R, C, 1.0)
            m = gf.build_rc(p)
            traj = gf.integrate(m, [0.0], 5.0 * R * C, 1e-3)
            ser = gf.analyze_trajectory(traj, m)
            dev = np.abs(ser.rho[ser.valid] - p.eigenvalue)
            assert dev.max() < 1e-9

    def test_rejects_nonpositive_params(self):
        with pytest.raises(ValueError):
            RcParams(-1.0, 1.0, 1.0)
        with pytest.raises(ValueError):
            RcParams(1.0, 0.0, 1.0)


class TestRlc:
    def test_state_matrix_layout(self):
        m = gf.build_rlc(RlcParams(2.0, 4.0, 0.5, 3.0))
        assert np.allclose(m.A, [[-0.5, -0.25], [2.0, 0.0]])
        assert np.allclose(m.b, [0.75, 0.0])

    def test_underdamped_pair_vs_quadratic_oracle(self):
        p = RlcParams(1.0, 1.0, 1.0, 1.0)
        assert p.underdamped
        m = gf.build_rlc(p)
        spec = gf.classify_spectrum(m.A)
        # oracle: lambda = -R/2L +/- sqrt((R/2L)^2 - 1/LC)
        alpha = -p.R / (2 * p.L)
        beta = math.sqrt(1.0 / (p.L * p.C) - (p.R / (2 * p.L)) ** 2)
        assert spec.pairs[0] == pytest.approx([alpha, beta], abs=1e-12)
        assert beta == pytest.approx(math.sqrt(3.0) / 2.0)

    def test_critically_damped_is_defective(self):
        # discriminant (R/2L)^2 - 1/LC = 0 for R=2, L=1, C=1
        m = gf.build_rlc(RlcParams(2.0, 1.0, 1.0, 1.0))
        with pytest.raises(gf.NonDiagonalizableError):
            gf.classify_spectrum(m.A)

    def test_overdamped_two_reals(self):
        # discriminant 9/4 - 1 > 0 for R=3, L=1, C=1
        m = gf.build_rlc(RlcParams(3.0, 1.0, 1.0, 1.0))
        spec = gf.classify_spectrum(m.A)
        assert spec.r == 2 and spec.s == 0


class TestThirdOrder:
    def test_default_parameter_matrix(self, third_order_matrix):
        m = gf.build_third_order(ThirdOrderParams())
        assert np.array_equal(m.A, third_order_matrix)
        assert np.array_equal(m.b, [0.0, 1.0, 1.0])

    def test_eigenvalues(self):
        m = gf.build_third_order(ThirdOrderParams())
        spec = gf.classify_spectrum(m.A)
        assert spec.real_eigs == pytest.approx([-1.0], abs=1e-12)
        assert spec.pairs[0] == pytest.approx([-0.5, math.sqrt(7.0) / 2.0], abs=1e-12)

    def test_modal_form_matches_displayed_g(self):
        m = gf.build_third_order(ThirdOrderParams())
        form = gf.real_modal_form(m.A)
        s7 = math.sqrt(7.0) / 2.0
        assert np.allclose(form.G, [[-1, 0, 0], [0, -0.5, -s7], [0, s7, -0.5]], atol=1e-10)

    def test_general_parameters(self):
        p = ThirdOrderParams(R1=2.0, L=0.5, C1=0.1, R2=4.0, C2=0.25, V_dc=2.0)
        m = gf.build_third_order(p)
        assert np.allclose(m.A, [[0, 10, 0], [-2, -4, 0], [0, 0, -1.0]])
        assert np.allclose(m.b, [0.0, 4.0, 2.0])


class TestTunnelDiode:
    def test_jacobian_structure(self):
        # d(v')/d(i_L) = 1/C
        m = gf.build_tunnel_diode(TunnelDiodeParams(1.0, 0.5, 0.2, 0.5))
        J = m.jac([0.1, 0.1])
        assert J[0, 1] == 2.0
        assert J[1, 0] == -1.0
        assert J[1, 1] == -0.2
        assert J[0, 0] == pytest.approx(-diode_conductance(0.1) / 0.5)

    def test_flow_formula(self):
        p = TunnelDiodeParams(2.0, 0.5, 0.3, 0.7)
        m = gf.build_tunnel_diode(p)
        x = np.array([0.2, 0.4])
        u = m.flow(x)
        assert u[0] == pytest.approx((-diode_current(0.2) + 0.4) / 0.5)
        assert u[1] == pytest.approx((0.7 - 0.3 * 0.4 - 0.2) / 2.0)

    def test_batch_evaluators_match_scalar(self):
        m = gf.build_tunnel_diode(TunnelDiodeParams(1.0, 1.0, 0.3688, 0.264))
        rng = np.random.default_rng(2)
        X = rng.uniform(0.0, 0.5, (20, 2))
        U = m.flow_batch(X)
        dU = m.jac_vel_batch(X, U)
        for k in range(20):
            assert np.allclose(U[k], m.flow(X[k]))
            assert np.allclose(dU[k], m.jac(X[k]) @ U[k])

    def test_default_characteristic_is_n_shaped(self):
        v = np.linspace(0.0, 0.6, 2001)
        changes = np.count_nonzero(np.diff(np.sign(diode_conductance(v))) != 0)
        assert changes == 2
        assert diode_current(0.0) == 0.0

    def test_monotonic_characteristic_rejected(self):
        with pytest.raises(ValueError, match="N-shaped"):
            TunnelDiodeParams(1.0, 1.0, 1.0, 0.5, diode_poly=(1.0, 0.0, 0.0, 0.0, 0.0))

    def test_wrong_coefficient_count_rejected(self):
        with pytest.raises(ValueError, match="five"):
            TunnelDiodeParams(1.0, 1.0, 1.0, 0.5, diode_poly=(1.0, 2.0))

    def test_monotonic_scenario_converges_to_equilibrium(self):
        # dominant eigenvalue at the equilibrium is about -0.28, so the
        # velocity decays like exp(-0.28 t): ~1e-6 by t = 40, ~3e-9 by t = 60
        m = gf.build_tunnel_diode(TunnelDiodeParams(1.0, 0.5, 0.2, 0.5))
        traj = gf.integrate(m, [0.0, 0.0], 60.0, 1e-3)
        assert np.abs(m.flow(traj.states[-1])).max() < 1e-8

    def test_limit_cycle_scenario_does_not_converge(self):
        m = gf.build_tunnel_diode(TunnelDiodeParams(1.0, 1.0, 0.3688, 0.264))
        traj = gf.integrate(m, [0.0, 0.0], 80.0, 1e-3)
        # no equilibrium convergence within the horizon; a closed orbit instead
        assert np.abs(m.flow(traj.states[-1])).max() > 1e-3
        ser = gf.analyze_trajectory(traj, m)
        rep = gf.detect_limit_cycle(ser, traj.velocities[:, 0])
        assert rep.detected
        assert rep.period_spread < 0.01


class TestBuiltinScenarios:
    def test_expected_names(self):
        assert set(BUILTIN_SCENARIOS) == {
            "rc", "rlc", "third-order",
            "td-monotonic", "td-oscillatory", "td-isotropic", "td-limit-cycle",
            "td-two-equilibria-a", "td-two-equilibria-b",
        }

    def test_default_poly_shipped_in_td_scenarios(self):
        for name, sections in BUILTIN_SCENARIOS.items():
            if name.startswith("td-"):
                got = tuple(float(v) for v in sections["system"]["diode_poly"].split(","))
                assert got == DEFAULT_DIODE_POLY

    def test_isotropic_calibration(self):
        # the recalibrated V_dc puts the equilibrium where i_R'(v*) = R,
        # making the Jacobian an exact scaled rotation
        sec = BUILTIN_SCENARIOS["td-isotropic"]["system"]
        R, V = float(sec["R"]), float(sec["V_dc"])
        p = TunnelDiodeParams(1.0, 1.0, R, V)
        m = gf.build_tunnel_diode(p)
        x_star = gf.equilibrium_find(m, [0.1, 0.7])
        assert diode_conductance(x_star[0]) == pytest.approx(R, abs=1e-6)
        spec = gf.classify_spectrum(m.jac(x_star))
        assert spec.pairs[0] == pytest.approx([-R, 1.0], abs=1e-6)
