"""
Tests for real spherical harmonics and the sphere quadrature.
"""

import numpy as np
import pytest

from tumor_spectra.errors import ConfigurationError
from tumor_spectra.models.surfaces import SphereFunction
from tumor_spectra.tools.harmonics import (
    SphereGrid,
    degree_order_pairs,
    discrete_laplace_beltrami,
    flat_index,
    laplace_beltrami_multiplier,
    legendre,
    n_coeffs,
    real_ylm,
    sphere_grid,
    tangent_frame,
)


class TestIndexing:
    """Test cases for coefficient ordering."""

    def test_flat_index_order(self):
        """Test that (l, m) pairs enumerate 0, 1, 2, ... in order."""
        indices = [flat_index(l, m) for l, m in degree_order_pairs(4)]

        assert indices == list(range(n_coeffs(4)))
        assert flat_index(2, -2) == 4

    def test_laplace_beltrami_multiplier(self):
        """Test -l(l+1) and the rejection of negative degrees."""
        assert laplace_beltrami_multiplier(3) == -12.0
        with pytest.raises(ConfigurationError):
            laplace_beltrami_multiplier(-1)


class TestHarmonics:
    """Test cases for Legendre functions and real harmonics."""

    def test_orthonormal_on_grid(self):
        """Test that the Gram matrix on the band-limit grid is the identity."""
        grid = SphereGrid(6)

        np.testing.assert_allclose(grid.gram(6), np.eye(n_coeffs(6)), atol=1e-12)

    def test_negative_order_legendre(self):
        """Test P_l^{-m} = (-1)^m (l-m)!/(l+m)! P_l^m."""
        theta = np.linspace(0.1, 3.0, 7)

        np.testing.assert_allclose(
            legendre(3, -2, theta), legendre(3, 2, theta) / 120.0, rtol=1e-13
        )
        assert np.all(legendre(2, 3, theta) == 0.0)

    def test_theta_derivatives(self):
        """Test first and second theta-derivatives against closed forms."""
        theta = np.linspace(0.05, 3.1, 11)
        phi = np.zeros_like(theta)
        n1 = np.sqrt(3.0 / (4.0 * np.pi))
        n2 = np.sqrt(5.0 / (4.0 * np.pi))

        np.testing.assert_allclose(
            real_ylm(1, 0, theta, phi, dtheta=1), -n1 * np.sin(theta), atol=1e-13
        )
        np.testing.assert_allclose(
            real_ylm(2, 0, theta, phi, dtheta=2),
            -3.0 * n2 * np.cos(2.0 * theta),
            atol=1e-12,
        )

    def test_phi_derivative(self):
        """Test that d/dphi of the cosine harmonic is minus m times the sine one."""
        theta, phi = np.array([0.7, 1.9]), np.array([0.3, 4.0])

        np.testing.assert_allclose(
            real_ylm(3, 2, theta, phi, dphi=1),
            -2.0 * real_ylm(3, -2, theta, phi),
            atol=1e-13,
        )

    def test_order_out_of_range(self):
        """Test that |m| > l is rejected."""
        with pytest.raises(ConfigurationError):
            real_ylm(1, 2, 0.5, 0.5)


class TestSphereGrid:
    """Test cases for analysis, synthesis and the Laplace-Beltrami operator."""

    def test_surface_area(self):
        """Test that the weights integrate 1 to 4 pi."""
        assert sphere_grid(4).integrate(np.ones(sphere_grid(4).size)) == (
            pytest.approx(4.0 * np.pi, rel=1e-14)
        )

    def test_analysis_recovers_coefficients(self):
        """Test that sampling and analyzing a band-limited function is exact."""
        rho = SphereFunction.from_modes(5, {(2, 1): 0.3, (5, -4): -0.7, (0, 0): 1.0})
        grid = sphere_grid(10)

        coeffs = grid.analyze(rho.on_grid(grid), 5)

        np.testing.assert_allclose(coeffs, rho.coeffs, atol=1e-13)

    def test_discrete_laplace_beltrami(self):
        """Test that Y_32 is an eigenfunction with eigenvalue -12."""
        grid = sphere_grid(8)
        values = real_ylm(3, 2, grid.theta, grid.phi)

        np.testing.assert_allclose(
            discrete_laplace_beltrami(grid, values), -12.0 * values, atol=1e-10
        )

    def test_multiplier_form_matches(self):
        """Test SphereFunction.laplace_beltrami against the coordinate form."""
        rho = SphereFunction.from_modes(4, {(1, 0): 0.2, (4, 3): 0.1})
        grid = sphere_grid(8)

        np.testing.assert_allclose(
            rho.laplace_beltrami().on_grid(grid),
            discrete_laplace_beltrami(grid, rho.on_grid(grid), 4),
            atol=1e-10,
        )

    def test_too_coarse(self):
        """Test that undersized grids are rejected."""
        with pytest.raises(ConfigurationError):
            SphereGrid(6, n_theta=4)
        with pytest.raises(ConfigurationError):
            sphere_grid(4).analyze(np.ones(sphere_grid(4).size), 5)

    def test_tangent_frame_orthonormal(self):
        """Test that (omega, e_theta, e_phi) is orthonormal."""
        omega, e_t, e_p = tangent_frame(np.array([0.4, 2.2]), np.array([1.0, 5.0]))
        frame = np.stack([omega, e_t, e_p], axis=1)

        for k in range(2):
            np.testing.assert_allclose(
                frame[k] @ frame[k].T, np.eye(3), atol=1e-14
            )

    def test_from_modes_outside_band(self):
        """Test that a mode above the band limit is rejected."""
        with pytest.raises(ConfigurationError):
            SphereFunction.from_modes(2, {(3, 0): 1.0})
