"""Constitutive laws, the entropic change of variables, coefficient bundles."""

import numpy as np
import pytest

from mixtura.model import (ConvergenceError, DomainError, EntropicPoint,
                           EquilibriumCoefficients, MixtureParams, PointState,
                           equilibrium_coefficients, flux_closed_form,
                           flux_entropic, gradient_reconstruction, phi,
                           pressure, psi, spatial_coefficients)

PARAMS = MixtureParams(m1=1.0, m2=2.0, mu=0.1, nu=0.1)


def random_states(rng, n):
    rho1 = rng.uniform(0.2, 3.0, n)
    rho2 = rng.uniform(0.2, 3.0, n)
    return PointState(rho1=rho1, rho2=rho2)


class TestValidation:
    def test_equal_molar_masses_rejected(self):
        with pytest.raises(DomainError):
            MixtureParams(m1=1.0, m2=1.0, mu=0.1, nu=0.1)

    @pytest.mark.parametrize("kw", [
        dict(m1=-1.0, m2=2.0, mu=0.1, nu=0.1),
        dict(m1=1.0, m2=0.0, mu=0.1, nu=0.1),
        dict(m1=1.0, m2=2.0, mu=0.0, nu=0.1),
        dict(m1=1.0, m2=2.0, mu=0.1, nu=-0.2),
    ])
    def test_nonpositive_parameters_rejected(self, kw):
        with pytest.raises(DomainError):
            MixtureParams(**kw)

    def test_nonpositive_densities_rejected(self):
        with pytest.raises(DomainError):
            PointState(rho1=0.0, rho2=1.0)
        with pytest.raises(DomainError):
            PointState(rho1=1.0, rho2=-0.5)
        with pytest.raises(DomainError):
            EntropicPoint(h=0.0, rho=0.0)


class TestPressure:
    def test_direct_evaluation(self):
        assert pressure(PointState(1.0, 2.0), PARAMS) == pytest.approx(2.0)

    def test_direct_evaluation_other_masses(self):
        p = MixtureParams(m1=2.0, m2=5.0, mu=0.1, nu=0.1)
        assert pressure(PointState(0.3, 0.7), p) == pytest.approx(0.29)

    def test_mass_relabel_symmetry(self):
        # pressure at equal densities is invariant under swapping the species
        # labels together with their molar masses (the m1 = m2 case itself is
        # rejected at construction)
        p_swap = MixtureParams(m1=2.0, m2=1.0, mu=0.1, nu=0.1)
        assert pressure(PointState(1.0, 1.0), PARAMS) == pytest.approx(
            pressure(PointState(1.0, 1.0), p_swap))


class TestChangeOfVariables:
    def test_psi_direct(self):
        e = psi(PointState(1.0, 2.0), PARAMS)
        assert e.h == pytest.approx(0.5 * np.log(2.0), abs=1e-15)
        assert e.rho == pytest.approx(3.0)

    def test_psi_label_swap_flips_h(self):
        p_swap = MixtureParams(m1=2.0, m2=1.0, mu=0.1, nu=0.1)
        e = psi(PointState(1.0, 1.0), PARAMS)
        e_swap = psi(PointState(1.0, 1.0), p_swap)
        assert e.h == pytest.approx(-e_swap.h, abs=1e-15)

    def test_phi_inverts_psi_example(self):
        # frozen from inverting the psi example by root-finding
        back = phi(EntropicPoint(h=0.5 * np.log(2.0), rho=3.0), PARAMS)
        assert back.rho1 == pytest.approx(1.0, abs=1e-12)
        assert back.rho2 == pytest.approx(2.0, abs=1e-12)

    def test_roundtrip_phi_psi(self):
        rng = np.random.default_rng(7)
        state = random_states(rng, 100)
        back = phi(psi(state, PARAMS), PARAMS)
        np.testing.assert_allclose(back.rho1, state.rho1, atol=1e-12, rtol=0)
        np.testing.assert_allclose(back.rho2, state.rho2, atol=1e-12, rtol=0)

    def test_roundtrip_psi_phi(self):
        rng = np.random.default_rng(8)
        h = rng.uniform(-2.0, 2.0, 100)
        rho = rng.uniform(0.3, 5.0, 100)
        there = psi(phi(EntropicPoint(h=h, rho=rho), PARAMS), PARAMS)
        np.testing.assert_allclose(there.h, h, atol=1e-12, rtol=0)
        np.testing.assert_allclose(there.rho, rho, atol=1e-12, rtol=0)

    def test_h_strictly_decreasing_in_rho1(self):
        rho = 2.5
        r1 = np.linspace(0.05, rho - 0.05, 40)
        h = psi(PointState(r1, rho - r1), PARAMS).h
        assert np.all(np.diff(h) < 0)

    def test_phi_skewed_h_converges(self):
        # rho1 ~ 4e-5 here, far above the absolute root tolerance
        state = phi(EntropicPoint(h=10.0, rho=1.0), PARAMS)
        assert 0.0 < state.rho1 < 1.0
        there = psi(state, PARAMS)
        assert there.h == pytest.approx(10.0, rel=1e-9)

    def test_phi_iteration_cap(self):
        with pytest.raises(ConvergenceError):
            phi(EntropicPoint(h=5.0, rho=2.0), PARAMS, max_iter=2)


class TestFluxes:
    def test_zero_gradients_zero_flux(self):
        assert flux_closed_form(PointState(1.0, 2.0), 0.0, 0.0, PARAMS) == 0.0
        assert flux_entropic(PointState(1.0, 2.0), 0.0, PARAMS) == 0.0

    def test_closed_form_example(self):
        # p = 1.5, F1 = -(1/p)(1/2) = -1/3
        f1 = flux_closed_form(PointState(1.0, 1.0), 1.0, 0.0, PARAMS)
        assert f1 == pytest.approx(-1.0 / 3.0, abs=1e-15)

    def test_entropic_example(self):
        f1 = flux_entropic(PointState(1.0, 1.0), 1.0, PARAMS)
        assert f1 == pytest.approx(1.0 / 3.0, abs=1e-15)

    def test_entropic_coefficient_positive(self):
        rng = np.random.default_rng(3)
        state = random_states(rng, 200)
        coeff = flux_entropic(state, np.ones(200), PARAMS)
        assert np.all(coeff > 0)

    def test_cross_form_identity(self):
        # closed form fed with gradients reconstructed from (grad rho, grad h)
        # equals the entropic form pointwise
        rng = np.random.default_rng(4)
        state = random_states(rng, 100)
        grad_rho = rng.uniform(-2.0, 2.0, 100)
        grad_h = rng.uniform(-2.0, 2.0, 100)
        g1, g2 = gradient_reconstruction(state, grad_rho, grad_h, PARAMS)
        f_closed = flux_closed_form(state, g1, g2, PARAMS)
        f_entropic = flux_entropic(state, grad_h, PARAMS)
        np.testing.assert_allclose(f_closed, f_entropic, atol=1e-13, rtol=0)


class TestGradientReconstruction:
    def test_zero_case(self):
        g1, g2 = gradient_reconstruction(PointState(1.0, 2.0), 0.0, 0.0, PARAMS)
        assert g1 == 0.0 and g2 == 0.0

    def test_row_sum_identity(self):
        rng = np.random.default_rng(5)
        state = random_states(rng, 200)
        grad_rho = rng.uniform(-3.0, 3.0, 200)
        grad_h = rng.uniform(-3.0, 3.0, 200)
        g1, g2 = gradient_reconstruction(state, grad_rho, grad_h, PARAMS)
        np.testing.assert_allclose(g1 + g2, grad_rho, atol=1e-14, rtol=0)

    def test_pressure_gradient_identity(self):
        rng = np.random.default_rng(6)
        state = random_states(rng, 100)
        grad_rho = rng.uniform(-2.0, 2.0, 100)
        grad_h = rng.uniform(-2.0, 2.0, 100)
        g1, g2 = gradient_reconstruction(state, grad_rho, grad_h, PARAMS)
        lhs = g1 / PARAMS.m1 + g2 / PARAMS.m2
        sigma = PARAMS.m1 * state.rho1 + PARAMS.m2 * state.rho2
        rhs = (state.rho / sigma * grad_rho
               + (PARAMS.m1 - PARAMS.m2) * state.rho1 * state.rho2 / sigma
               * grad_h)
        np.testing.assert_allclose(lhs, rhs, atol=1e-13, rtol=0)


class TestCoefficients:
    def test_spatial_example(self):
        c = spatial_coefficients(1.0, 1.0, PARAMS)
        assert c.sigma_rho0 == pytest.approx(3.0)
        assert c.gamma1 == pytest.approx(2.0 / 3.0)
        assert c.gamma2 == pytest.approx(-1.0 / 3.0)
        assert c.gamma3 == pytest.approx(2.0 / 3.0)
        assert c.p0 == pytest.approx(1.5)
        assert c.gamma4 == pytest.approx(1.0 / 3.0)

    def test_gamma2_vanishes_in_equal_mass_limit(self):
        p = MixtureParams(m1=1.0, m2=1.0 + 1e-9, mu=0.1, nu=0.1)
        c = spatial_coefficients(1.0, 1.0, p)
        assert abs(c.gamma2) < 1e-9

    def test_positive_coefficients(self):
        rng = np.random.default_rng(9)
        r1 = rng.uniform(0.1, 4.0, 100)
        r2 = rng.uniform(0.1, 4.0, 100)
        c = spatial_coefficients(r1, r2, PARAMS)
        for arr in (c.rho0, c.gamma1, c.gamma3, c.gamma4, c.sigma_rho0, c.p0):
            assert np.all(np.asarray(arr) > 0)
        assert np.all(np.sign(c.gamma2) == np.sign(PARAMS.m1 - PARAMS.m2))

    def test_equilibrium_example(self):
        c = equilibrium_coefficients(1.0, 1.0, PARAMS)
        assert c.a0 == pytest.approx(2.0)
        assert c.a1 == pytest.approx(2.0 / 3.0)
        assert c.a2 == pytest.approx(-1.0 / 3.0)
        assert c.a3 == pytest.approx(2.0 / 3.0)
        assert c.a4 == pytest.approx(1.0 / 3.0)

    def test_a2_sign_flips_under_mass_swap(self):
        p_swap = MixtureParams(m1=2.0, m2=1.0, mu=0.1, nu=0.1)
        c = equilibrium_coefficients(1.0, 1.0, PARAMS)
        c_swap = equilibrium_coefficients(1.0, 1.0, p_swap)
        assert c.a2 == pytest.approx(-c_swap.a2)

    def test_spatial_matches_equilibrium_at_constant_state(self):
        r1s, r2s = 0.8, 1.7
        c_eq = equilibrium_coefficients(r1s, r2s, PARAMS)
        c_sp = spatial_coefficients(np.full(5, r1s), np.full(5, r2s), PARAMS)
        np.testing.assert_allclose(c_sp.rho0, c_eq.a0, rtol=0, atol=1e-15)
        np.testing.assert_allclose(c_sp.gamma1, c_eq.a1, rtol=0, atol=1e-15)
        np.testing.assert_allclose(c_sp.gamma2, c_eq.a2, rtol=0, atol=1e-15)
        np.testing.assert_allclose(c_sp.gamma3, c_eq.a3, rtol=0, atol=1e-15)
        np.testing.assert_allclose(c_sp.gamma4, c_eq.a4, rtol=0, atol=1e-15)

    def test_direct_construction_allows_zero_a2(self):
        c = EquilibriumCoefficients(a0=2.0, a1=0.5, a2=0.0, a3=0.5, a4=0.3,
                                    sigma_rho_star=3.0, p_star=1.5)
        assert c.a2 == 0.0

    def test_nonpositive_rejected(self):
        with pytest.raises(DomainError):
            spatial_coefficients(-1.0, 1.0, PARAMS)
        with pytest.raises(DomainError):
            equilibrium_coefficients(1.0, 0.0, PARAMS)
