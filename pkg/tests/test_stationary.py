"""
Tests for the radially symmetric stationary state.
"""

import numpy as np
import pytest

from tumor_spectra.analysis.stationary import (
    evaluate_profile,
    find_stationary_radius,
    growth_integral,
    refine_state,
    rescale_to_unit,
    solve_nutrient_profile,
    velocity_profile,
)
from tumor_spectra.errors import AssumptionError, SolverError
from tumor_spectra.models.rates import RateFunctionSpec, make_rate_function
from tumor_spectra.tools.chebyshev import unit_grid

from tests.fixtures.reference_models import (
    reference_profile,
    reference_radius,
    reference_sigma_prime_1,
)


class TestReferenceStationaryState:
    """Test cases comparing the reference model with its closed form."""

    def test_stationary_radius(self, physical_state):
        """Test R_s against the root of 3 (R coth R - 1) / R^2 = 1/2."""
        assert physical_state.radius == pytest.approx(reference_radius(), abs=1e-8)
        assert physical_state.radius == pytest.approx(4.734, abs=2e-3)

    def test_nutrient_profile(self, physical_state):
        """Test sigma against R sinh(r) / (r sinh R) at the nodes."""
        R = physical_state.radius
        expected = reference_profile(physical_state.nodes, R)

        np.testing.assert_allclose(physical_state.sigma, expected, atol=1e-8)

    def test_boundary_slope_on_unit_ball(self, unit_state):
        """Test sigma'(1) = R coth R - 1 after rescaling."""
        R = unit_state.physical_radius
        expected = reference_sigma_prime_1(R)

        assert unit_state.sigma_prime_1 == pytest.approx(expected, rel=1e-8)

    def test_residuals_small(self, physical_state):
        """Test that every stored residual is below 1e-8."""
        assert set(physical_state.residuals) >= {
            "nutrient",
            "divergence",
            "stationarity",
            "boundary",
        }
        assert max(physical_state.residuals.values()) < 1e-8

    def test_zero_total_growth(self, physical_state):
        """Test that the growth integral vanishes at R_s."""
        integral = growth_integral(
            physical_state.g,
            physical_state.sigma,
            physical_state.radius,
            physical_state.grid,
        )

        assert abs(integral) < 1e-10

    def test_velocity_vanishes_at_boundary(self, unit_state):
        """Test v(1) = 0 for the rescaled stationary state."""
        assert abs(unit_state.v[-1]) < 1e-10

    def test_center_value(self, physical_state):
        """Test interpolation at r = 0 against R / sinh R."""
        R = physical_state.radius

        assert float(evaluate_profile(physical_state, 0.0)) == pytest.approx(
            R / np.sinh(R), rel=1e-9
        )


class TestRescaling:
    """Test cases for the unit-ball normalization."""

    def test_rescaled_state_metadata(self, physical_state, unit_state):
        """Test radius, grid and rescaled rate laws."""
        R = physical_state.radius

        assert unit_state.radius == 1.0
        assert unit_state.physical_radius == R
        assert unit_state.rescaled
        assert unit_state.grid.nodes[-1] == 1.0
        assert unit_state.f.scale == pytest.approx(R * R)
        assert unit_state.sidecar()["R_s"] == R

    def test_pressure_identity(self, physical_state):
        """Test p = (4/3) g(sigma) + gamma on the unit ball."""
        state = rescale_to_unit(physical_state, gamma=5.0)
        expected = (4.0 / 3.0) * state.g.values(state.sigma) + 5.0

        np.testing.assert_allclose(state.p, expected, rtol=1e-14)
        assert state.residuals["momentum"] < 1e-12

    def test_boundary_normal_stress(self, physical_state):
        """Test 2 v''(1) - p'(1) - (2/3) g' sigma'(1) = -4 g(1)."""
        state = rescale_to_unit(physical_state, gamma=5.0)
        grid = state.grid
        v_dd = float(grid.boundary_row(2, -1) @ state.v)
        p_d = float(grid.boundary_row(1, 1) @ state.p)
        g_d = float(state.g.derivative(1.0))

        lhs = 2.0 * v_dd - p_d - (2.0 / 3.0) * g_d * state.sigma_prime_1
        expected = -4.0 * float(state.g.values(1.0))

        assert lhs == pytest.approx(expected, rel=1e-8, abs=1e-7)

    def test_rows_carry_pressure(self, physical_state):
        """Test that to_rows exports r, sigma, v and p."""
        state = rescale_to_unit(physical_state, gamma=5.0)
        rows = state.to_rows()

        assert len(rows) == state.grid.n
        assert set(rows[0]) == {"r", "sigma", "v", "p"}
        assert rows[-1]["r"] == 1.0
        assert rows[-1]["sigma"] == pytest.approx(1.0, abs=1e-14)

    def test_refine_state(self, unit_state):
        """Test that re-solving on 160 nodes keeps the profile."""
        refined = refine_state(unit_state, 160)
        R = unit_state.physical_radius

        assert refined.grid.n == 160
        np.testing.assert_allclose(
            refined.sigma, reference_profile(R * refined.nodes, R), atol=1e-8
        )
        assert refine_state(unit_state, unit_state.grid.n) is unit_state


class TestStationaryBuildingBlocks:
    """Test cases for the individual solvers."""

    def test_velocity_of_constant_growth(self):
        """Test v = r/3 when g = 1."""
        g = make_rate_function(RateFunctionSpec(family="polynomial", coeffs=[1.0]))
        grid = unit_grid(32)

        v = velocity_profile(g, np.ones(grid.n), 1.0, grid)

        np.testing.assert_allclose(v, grid.nodes / 3.0, atol=1e-13)

    def test_nutrient_profile_nonpositive_radius(self, linear_rates):
        """Test that R <= 0 raises SolverError."""
        f, _ = linear_rates

        with pytest.raises(SolverError):
            solve_nutrient_profile(f, 0.0, unit_grid(32))

    def test_no_root_in_window(self, linear_rates):
        """Test that a window without a sign change raises SolverError."""
        f, g = linear_rates

        with pytest.raises(SolverError, match="no stationary radius"):
            find_stationary_radius(f, g, n=32, window=(0.01, 1.0), scan_points=20)

    def test_assumptions_checked_first(self, linear_rates):
        """Test that a zero of g above sigma_bar raises before any solve."""
        f, _ = linear_rates
        g = make_rate_function(RateFunctionSpec(family="linear", coeffs=[1.0, 1.5]))

        with pytest.raises(AssumptionError):
            find_stationary_radius(f, g, n=32)

    def test_nonlinear_consumption(self):
        """Test a saturating polynomial consumption law converges."""
        f = make_rate_function(
            RateFunctionSpec(family="polynomial", coeffs=[0.0, 1.0, 0.25])
        )
        g = make_rate_function(RateFunctionSpec(family="linear", coeffs=[1.0, 0.4]))

        state = find_stationary_radius(f, g, n=64)

        assert state.radius > 0.0
        assert max(state.residuals.values()) < 1e-8
        assert np.all((state.sigma > 0.0) & (state.sigma <= 1.0 + 1e-12))
