"""
Tests for the per-mode Stokes solver and the multiplier oracle.
"""

import numpy as np
import pytest

from tumor_spectra.analysis.spectrum import alpha_slope, bgamma_multiplier
from tumor_spectra.analysis.stokes import (
    bgamma_via_stokes,
    divergence_residual,
    modal_J,
    oracle_report,
    solve_modal_stokes,
)
from tumor_spectra.errors import ConfigurationError, IncompatibleDataError
from tumor_spectra.models.profiles import ModalStokesProblem
from tumor_spectra.tools.chebyshev import RadialGrid, unit_grid


def _source(l, grid):
    r = grid.nodes
    return r**l * (1.0 - r * r) + 0.3 * r**l


class TestModalStokesSolve:
    """Test cases for solve_modal_stokes."""

    @pytest.mark.parametrize("l", [0, 1, 2, 3, 7])
    def test_divergence_constraint(self, l):
        """Test that div V = phi Y holds at the interior nodes."""
        grid = unit_grid(48)
        phi = _source(l, grid)
        problem = ModalStokesProblem(
            l=l, source=phi, body_force_grad_coeff=1.0 / 3.0
        )

        solution = solve_modal_stokes(problem, grid)

        assert divergence_residual(solution, phi) < 1e-9

    def test_batched_columns_match_single_solves(self):
        """Test that a stacked source gives the column-by-column answers."""
        grid = unit_grid(32)
        stack = np.stack([_source(2, grid), grid.nodes**4], axis=1)

        batched = solve_modal_stokes(ModalStokesProblem(l=2, source=stack), grid)

        for k in range(2):
            single = solve_modal_stokes(
                ModalStokesProblem(l=2, source=stack[:, k]), grid
            )
            assert batched.boundary_normal_velocity[k] == pytest.approx(
                single.boundary_normal_velocity, abs=1e-13
            )

    def test_degree_one_net_force(self):
        """Test that degree-1 traction with a net force is incompatible."""
        grid = unit_grid(32)
        problem = ModalStokesProblem(
            l=1, source=np.zeros(grid.n), traction_normal=1.0
        )

        with pytest.raises(IncompatibleDataError) as exc_info:
            solve_modal_stokes(problem, grid)
        assert exc_info.value.exit_code == 2

    def test_degree_one_balanced_traction(self):
        """Test that h_n + 2 h_t = 0 is compatible at l = 1."""
        grid = unit_grid(32)
        problem = ModalStokesProblem(
            l=1, source=np.zeros(grid.n), traction_normal=2.0, traction_tangent=-1.0
        )

        solution = solve_modal_stokes(problem, grid)

        assert np.all(np.isfinite(solution.u_r))

    def test_requires_unit_chebyshev_grid(self):
        """Test that scaled or uniform grids are rejected."""
        grid = RadialGrid(32, radius=2.0)

        with pytest.raises(ConfigurationError):
            solve_modal_stokes(ModalStokesProblem(l=2, source=np.ones(32)), grid)

    def test_source_size_mismatch(self):
        """Test that the source must have one value per node."""
        with pytest.raises(ConfigurationError):
            solve_modal_stokes(
                ModalStokesProblem(l=2, source=np.ones(10)), unit_grid(32)
            )

    def test_modal_J_is_linear(self, unit_state):
        """Test j_l[a u + b w] = a j_l[u] + b j_l[w]."""
        r = unit_state.nodes
        u, w = r**2 * (1.0 - r**2), r**2 * np.cos(r)

        combined = modal_J(2, 2.0 * u - 3.0 * w, unit_state)
        separate = 2.0 * modal_J(2, u, unit_state) - 3.0 * modal_J(2, w, unit_state)

        assert combined == pytest.approx(separate, rel=1e-10, abs=1e-12)


class TestMultiplierOracle:
    """Test cases comparing Stokes-solve multipliers with the closed formulas."""

    def test_oracle_agreement(self, unit_state, reference_summary):
        """Test agreement to 1e-6 for l = 0..12 at three surface tensions."""
        g_star = reference_summary.gamma_star
        gammas = [0.8 * g_star, g_star, 1.2 * g_star]

        rows = oracle_report(unit_state, range(13), gammas)

        assert len(rows) == 13 * 3
        assert max(row["rel_err"] for row in rows) < 1e-6

    @pytest.mark.parametrize("gamma", [1.0, 10.0])
    def test_degree_one_vanishes(self, unit_state, gamma):
        """Test that the translation mode has a zero multiplier."""
        assert abs(bgamma_via_stokes(1, gamma, unit_state)) < 1e-9

    def test_radial_mode_matches_alpha0(self, unit_state):
        """Test that the l = 0 Stokes multiplier is alpha0 for any gamma."""
        a = bgamma_via_stokes(0, 1.0, unit_state)
        b = bgamma_via_stokes(0, 50.0, unit_state)

        assert a == pytest.approx(bgamma_multiplier(0, 1.0, unit_state), rel=1e-8)
        assert a == pytest.approx(b, rel=1e-12)

    @pytest.mark.parametrize("l", [2, 3, 5, 8])
    def test_slope_in_gamma(self, unit_state, l):
        """Test the gamma-slope of the Stokes multiplier."""
        low = bgamma_via_stokes(l, 2.0, unit_state)
        high = bgamma_via_stokes(l, 6.0, unit_state)

        assert (high - low) / 4.0 == pytest.approx(alpha_slope(l), rel=1e-6)
