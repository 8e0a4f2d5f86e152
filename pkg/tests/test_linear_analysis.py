"""Assembled linear operators: spectra, kernels, energy dissipation."""

import numpy as np
import pytest

from mixtura.discretization import Grid1D
from mixtura.linear_analysis import (assemble_constant, assemble_variable,
                                     energy_dissipation_check, kernel_vectors,
                                     march_linear, spectrum)
from mixtura.model import (EquilibriumCoefficients, MixtureParams,
                           equilibrium_coefficients, spatial_coefficients)

PARAMS = MixtureParams(m1=1.0, m2=2.0, mu=0.1, nu=0.1)
COEFFS = equilibrium_coefficients(1.0, 1.0, PARAMS)
WALL = Grid1D(n=32, length=1.0, bc="wall")


def decoupled_coeffs():
    return EquilibriumCoefficients(a0=2.0, a1=2.0 / 3.0, a2=0.0, a3=2.0 / 3.0,
                                   a4=1.0 / 3.0, sigma_rho_star=3.0, p_star=1.5)


class TestAssembly:
    def test_zero_a2_decouples_theta(self):
        op = assemble_constant(decoupled_coeffs(), WALL, PARAMS)
        m, f = op.npoints, op.nfaces_v
        a = op.matrix
        # theta feels no velocity and the momentum feels no theta
        assert np.all(a[m + f:, m:m + f] == 0.0)
        assert np.all(a[m:m + f, m + f:] == 0.0)
        # the (zeta, v) coupling survives
        assert np.any(a[0:m, m:m + f] != 0.0)

    def test_constant_fields_reproduce_constant_assembly(self):
        fields = spatial_coefficients(np.full(WALL.npoints, 1.0),
                                      np.full(WALL.npoints, 1.0), PARAMS)
        op_var = assemble_variable(fields, WALL, PARAMS)
        op_const = assemble_constant(COEFFS, WALL, PARAMS)
        assert np.array_equal(op_var.matrix, op_const.matrix)

    def test_variable_positivity_validated(self):
        fields = spatial_coefficients(np.full(WALL.npoints, 1.0),
                                      np.full(WALL.npoints, 1.0), PARAMS)
        bad = type(fields)(rho0=fields.rho0 * -1.0, sigma_rho0=fields.sigma_rho0,
                           gamma1=fields.gamma1, gamma2=fields.gamma2,
                           gamma3=fields.gamma3, gamma4=fields.gamma4,
                           p0=fields.p0)
        with pytest.raises(ValueError):
            assemble_variable(bad, WALL, PARAMS)

    def test_theta_block_rows_sum_to_zero(self):
        rng = np.random.default_rng(0)
        r1 = 1.0 + 0.1 * rng.standard_normal(WALL.npoints)
        r2 = 1.0 + 0.1 * rng.standard_normal(WALL.npoints)
        op = assemble_variable(spatial_coefficients(r1, r2, PARAMS), WALL,
                               PARAMS)
        m, f = op.npoints, op.nfaces_v
        block = op.matrix[m + f:, m + f:]
        np.testing.assert_allclose(block.sum(axis=1), 0.0, atol=1e-9)


class TestSpectrum:
    def test_kernel_vectors_are_exact_null_vectors(self):
        op = assemble_constant(COEFFS, WALL, PARAMS)
        for vec in kernel_vectors(op):
            assert np.max(np.abs(op.matrix @ vec)) <= 1e-13

    def test_wall_zero_mode_count(self):
        op = assemble_constant(COEFFS, WALL, PARAMS)
        rep = spectrum(op)
        assert rep.zero_mode_count == 2

    def test_periodic_zero_mode_count_matches_conserved(self):
        # mass, theta mass, and momentum are conserved without walls
        grid = Grid1D(n=32, length=1.0, bc="periodic")
        rep = spectrum(assemble_constant(COEFFS, grid, PARAMS))
        assert rep.zero_mode_count == 3

    def test_all_nonzero_modes_decay(self):
        op = assemble_constant(COEFFS, WALL, PARAMS)
        rep = spectrum(op)
        nonzero = rep.eigenvalues[np.abs(rep.eigenvalues) >= 1e-10]
        assert np.all(nonzero.real < 0.0)
        assert rep.decay_rate > 0.0

    def test_variable_modulated_spectrum_stays_stable(self):
        x = WALL.x
        r1 = 1.0 * (1.0 + 0.1 * np.cos(2 * np.pi * x))
        r2 = 1.0 * (1.0 - 0.1 * np.cos(2 * np.pi * x))
        op = assemble_variable(spatial_coefficients(r1, r2, PARAMS), WALL,
                               PARAMS)
        rep = spectrum(op)
        nonzero = rep.eigenvalues[np.abs(rep.eigenvalues) >= 1e-10]
        assert np.all(nonzero.real < 0.0)

    def test_theta_block_matches_fourier_symbol(self):
        # a2 = 0, periodic: the decoupled theta block is the discrete
        # diffusion whose eigenvalues are the circulant symbol exactly
        grid = Grid1D(n=32, length=1.0, bc="periodic")
        co = decoupled_coeffs()
        op = assemble_constant(co, grid, PARAMS)
        m, f = op.npoints, op.nfaces_v
        block = op.matrix[m + f:, m + f:]
        ev = np.sort(np.linalg.eigvals(block).real)
        k = np.arange(grid.n)
        symbol = np.sort(-(co.a4 / co.a3)
                         * (2.0 - 2.0 * np.cos(2.0 * np.pi * k / grid.n))
                         / grid.dx ** 2)
        np.testing.assert_allclose(ev, symbol, atol=1e-9)

    def test_theta_eigenvalues_converge_to_diffusion_rate(self):
        co = decoupled_coeffs()
        errs = []
        for n in (16, 32):
            grid = Grid1D(n=n, length=1.0, bc="periodic")
            analytic = -(co.a4 / co.a3) * (2.0 * np.pi / grid.length) ** 2
            op = assemble_constant(co, grid, PARAMS)
            m, f = op.npoints, op.nfaces_v
            ev = np.linalg.eigvals(op.matrix[m + f:, m + f:]).real
            nearest = ev[np.argmin(np.abs(ev - analytic))]
            errs.append(abs(nearest - analytic))
        assert 3.5 <= errs[0] / errs[1] <= 4.5

    def test_reference_decay_rate_near_continuum(self):
        # frozen from the m = 1 acoustic pair of the continuum symbol
        grid = Grid1D(n=128, length=1.0, bc="wall")
        rep = spectrum(assemble_constant(COEFFS, grid, PARAMS))
        assert rep.decay_rate == pytest.approx(0.5730775, rel=2e-3)

    def test_json_payload_shape(self):
        rep = spectrum(assemble_constant(COEFFS, WALL, PARAMS))
        payload = rep.to_json_dict()
        assert payload["zero_mode_count"] == 2
        assert len(payload["eigenvalues"][0]) == 2
        assert payload["decay_rate"] == -payload["spectral_abscissa_mean_zero"]


class TestEnergy:
    def test_zero_state_has_zero_dissipation(self):
        op = assemble_constant(COEFFS, WALL, PARAMS)
        u0 = np.zeros(op.size)
        du = op.matrix @ u0
        assert np.all(du == 0.0)

    def test_cross_terms_cancel_to_rounding(self):
        op = assemble_constant(COEFFS, WALL, PARAMS)
        report = energy_dissipation_check(op, trials=100, seed=2)
        assert report.max_residual_rel <= 1e-11
        assert report.all_dissipative

    def test_periodic_energy_also_dissipates(self):
        grid = Grid1D(n=32, length=1.0, bc="periodic")
        op = assemble_constant(COEFFS, grid, PARAMS)
        report = energy_dissipation_check(op, trials=50, seed=3)
        assert report.max_residual_rel <= 1e-11
        assert report.all_dissipative

    def test_variable_operator_rejected(self):
        fields = spatial_coefficients(np.full(WALL.npoints, 1.0),
                                      np.full(WALL.npoints, 1.0), PARAMS)
        op = assemble_variable(fields, WALL, PARAMS)
        with pytest.raises(ValueError):
            energy_dissipation_check(op)


class TestDecayConsistency:
    def test_marched_rate_matches_spectrum(self):
        grid = Grid1D(n=48, length=1.0, bc="wall")
        op = assemble_constant(COEFFS, grid, PARAMS)
        rep = spectrum(op)
        rng = np.random.default_rng(4)
        u0 = rng.standard_normal(op.size)
        # project out the conserved constants so the norm can decay
        w = op.stacked_weights
        for vec in kernel_vectors(op):
            u0 -= vec * np.dot(w, vec * u0) / np.dot(w, vec * vec)
        dt = 2e-3
        times, norms, _ = march_linear(op, u0, dt, nsteps=7000)
        mask = times >= 0.2 * times[-1]
        slope = np.polyfit(times[mask], np.log(norms[mask]), 1)[0]
        assert -slope == pytest.approx(rep.decay_rate, rel=0.05)
