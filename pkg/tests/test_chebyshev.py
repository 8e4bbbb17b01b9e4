"""
Tests for the parity-folded Chebyshev grids.
"""

import numpy as np
import pytest

from tumor_spectra.errors import ConfigurationError
from tumor_spectra.tools.chebyshev import (
    RadialGrid,
    cheb,
    clenshaw_curtis_weights,
    unit_grid,
)


class TestGridConstruction:
    """Test cases for node layout and validation."""

    def test_nodes_ascending_and_end_at_radius(self):
        """Test that nodes increase, avoid the origin and end exactly at R."""
        grid = RadialGrid(24, radius=2.5)

        assert np.all(np.diff(grid.nodes) > 0.0)
        assert grid.nodes[0] > 0.0
        assert grid.nodes[-1] == 2.5
        assert grid.nodes.size == 24

    def test_too_few_nodes(self):
        """Test that fewer than 16 nodes are rejected."""
        with pytest.raises(ConfigurationError):
            RadialGrid(8)

    def test_bad_kind_and_radius(self):
        """Test unknown kinds and nonpositive radii."""
        with pytest.raises(ConfigurationError):
            RadialGrid(16, kind="legendre")
        with pytest.raises(ConfigurationError):
            RadialGrid(16, radius=0.0)

    def test_unit_grid_is_shared(self):
        """Test that unit_grid returns one instance per size."""
        assert unit_grid(20) is unit_grid(20)
        assert unit_grid(20).radius == 1.0

    def test_with_radius(self):
        """Test that with_radius rescales the nodes."""
        grid = RadialGrid(20).with_radius(3.0)

        np.testing.assert_allclose(grid.nodes, 3.0 * unit_grid(20).nodes)


class TestChebyshevPrimitives:
    """Test cases for cheb and the Clenshaw-Curtis weights."""

    def test_cheb_differentiates_polynomials(self):
        """Test that D differentiates x^3 exactly."""
        x, D = cheb(9)

        np.testing.assert_allclose(D @ x**3, 3.0 * x**2, atol=1e-12)

    @pytest.mark.parametrize("N", [8, 9, 31])
    def test_weights_integrate_constants_and_quadratics(self, N):
        """Test the weights against integrals of 1 and x^2 on [-1, 1]."""
        x, _ = cheb(N)
        w = clenshaw_curtis_weights(N)

        assert w.sum() == pytest.approx(2.0, abs=1e-14)
        assert w @ x**2 == pytest.approx(2.0 / 3.0, abs=1e-14)


class TestSpectralOperators:
    """Test cases for differentiation, quadrature and interpolation."""

    def test_even_first_derivative(self):
        """Test D1 with even parity on cos(r)."""
        grid = RadialGrid(32)
        r = grid.nodes

        np.testing.assert_allclose(
            grid.diff_matrix(1, 1) @ np.cos(r), -np.sin(r), atol=1e-11
        )

    def test_odd_first_derivative(self):
        """Test D1 with odd parity on sin(r), on a grid of radius 2."""
        grid = RadialGrid(32, radius=2.0)
        r = grid.nodes

        np.testing.assert_allclose(
            grid.diff_matrix(1, -1) @ np.sin(r), np.cos(r), atol=1e-10
        )

    def test_unsupported_order(self):
        """Test that third derivatives are not offered."""
        with pytest.raises(ConfigurationError):
            RadialGrid(16).diff_matrix(3, 1)

    def test_radial_laplacian_of_sinh_profile(self):
        """Test that sinh(r)/r is an eigenfunction of the l = 0 operator."""
        grid = RadialGrid(32)
        u = np.sinh(grid.nodes) / grid.nodes

        np.testing.assert_allclose(grid.mode_operator(0) @ u, u, atol=1e-7)

    @pytest.mark.parametrize("l", [1, 2, 5])
    def test_solid_harmonics_are_harmonic(self, l):
        """Test that r^l is annihilated by the degree-l operator."""
        grid = RadialGrid(32)

        np.testing.assert_allclose(
            grid.mode_operator(l) @ grid.nodes**l, 0.0, atol=1e-7
        )

    def test_integrate_even_integrands(self):
        """Test quadrature of r^2 and cos(r) on [0, 2]."""
        grid = RadialGrid(24, radius=2.0)

        assert grid.integrate(grid.nodes**2) == pytest.approx(8.0 / 3.0, rel=1e-14)
        assert grid.integrate(np.cos(grid.nodes)) == pytest.approx(
            np.sin(2.0), rel=1e-13
        )

    @pytest.mark.parametrize("parity, func", [(1, np.cos), (-1, np.sin)])
    def test_interpolation(self, parity, func):
        """Test barycentric interpolation at off-grid radii including 0."""
        grid = RadialGrid(24)
        r = np.array([0.0, 0.013, 0.5, 0.77, 1.0])

        np.testing.assert_allclose(
            grid.interpolate(func(grid.nodes), r, parity), func(r), atol=1e-12
        )

    def test_boundary_row(self):
        """Test that the boundary row is the last row of the matrix."""
        grid = RadialGrid(20)

        np.testing.assert_array_equal(
            grid.boundary_row(1, 1), grid.diff_matrix(1, 1)[-1]
        )


class TestUniformGrid:
    """Test cases for the uniform fallback grid."""

    def test_trapezoid_integration(self):
        """Test trapezoid weights and integration on a uniform grid."""
        grid = RadialGrid(101, kind="uniform")

        assert not grid.is_spectral
        assert grid.nodes[0] == 0.0
        assert grid.integrate(grid.nodes) == pytest.approx(0.5, rel=1e-14)
        assert grid.weights.sum() == pytest.approx(1.0)

    def test_no_spectral_differentiation(self):
        """Test that uniform grids do not offer differentiation matrices."""
        with pytest.raises(ConfigurationError):
            RadialGrid(20, kind="uniform").diff_matrix(1, 1)

    def test_spline_interpolation(self):
        """Test that the uniform grid interpolates with a cubic spline."""
        grid = RadialGrid(50, kind="uniform")

        value = grid.interpolate(grid.nodes**2, 0.55)
        assert float(value) == pytest.approx(0.3025, rel=1e-10)
