"""
Radially symmetric stationary states.

The nutrient profile solves sigma'' + (2/r) sigma' = f(sigma) with
sigma(R) = 1, regular at the origin. The stationary radius is the zero of
the total proliferation integral of g(sigma) r^2 over the ball. Everything
is computed on the unit interval s = r / R, where the equation reads
sigma_ss + (2/s) sigma_s = R^2 f(sigma).
"""

import logging
from dataclasses import replace
from typing import List, Optional, Tuple

import numpy as np
from scipy.optimize import root_scalar

from ..errors import SolverError
from ..models.profiles import StationaryState
from ..models.rates import RateFunction, validate_assumptions
from ..tools.chebyshev import RadialGrid, unit_grid

logger = logging.getLogger(__name__)

DEFAULT_N = 128
DEFAULT_WINDOW = (1e-3, 50.0)
DEFAULT_SCAN_POINTS = 200


def _as_unit(grid: RadialGrid) -> RadialGrid:
    if grid.is_spectral:
        return unit_grid(grid.n)
    return RadialGrid(grid.n, grid.kind, 1.0)


def _scaled_residual(op: np.ndarray, sigma: np.ndarray, rhs: np.ndarray) -> np.ndarray:
    """Componentwise relative residual of op @ sigma = rhs (interior rows)."""
    res = op @ sigma - rhs
    scale = np.abs(op) @ np.abs(sigma) + np.abs(rhs)
    return np.abs(res[:-1]) / np.maximum(scale[:-1], np.finfo(float).tiny)


def _newton_profile(
    f: RateFunction,
    R: float,
    grid: RadialGrid,
    initial: Optional[np.ndarray] = None,
    tol: float = 1e-13,
    max_iterations: int = 50,
) -> Tuple[np.ndarray, List[float]]:
    op = grid.mode_operator(0)
    n = grid.n
    sigma = np.ones(n) if initial is None else np.array(initial, dtype=float)
    sigma[-1] = 1.0
    r2 = R * R

    def residual(s: np.ndarray) -> np.ndarray:
        F = op @ s - r2 * f.values(s)
        F[-1] = s[-1] - 1.0
        return F

    F = residual(sigma)
    history = [float(np.max(np.abs(F)))]
    for _ in range(max_iterations):
        J = op - np.diag(r2 * f.derivative(sigma))
        J[-1, :] = 0.0
        J[-1, -1] = 1.0
        delta = np.linalg.solve(J, -F)

        step, norm0 = 1.0, np.max(np.abs(F))
        while True:
            trial = sigma + step * delta
            F_trial = residual(trial)
            if np.max(np.abs(F_trial)) <= (1.0 - 1e-4 * step) * norm0 or step < 1e-3:
                break
            step *= 0.5
        sigma, F = trial, F_trial
        history.append(float(np.max(np.abs(F))))

        rel = _scaled_residual(op, sigma, r2 * f.values(sigma))
        if np.max(np.abs(step * delta)) <= 1e-14 * max(1.0, np.max(np.abs(sigma))) or (
            rel.size and np.max(rel) <= tol
        ):
            return sigma, history

    rel = _scaled_residual(op, sigma, r2 * f.values(sigma))
    if rel.size and np.max(rel) <= 1e-8:
        return sigma, history
    raise SolverError(
        f"Newton iteration for the nutrient profile did not converge at R={R}",
        residual_history=history,
    )


def solve_nutrient_profile(
    f: RateFunction,
    R: float,
    grid: RadialGrid,
    initial: Optional[np.ndarray] = None,
    tol: float = 1e-13,
    max_iterations: int = 50,
) -> np.ndarray:
    """
    Solve the stationary nutrient equation in a ball of radius R.

    Args:
        f: Consumption rate
        R: Ball radius
        grid: Chebyshev grid (its nodes are read as fractions of R)
        initial: Optional Newton starting profile on the grid
        tol: Componentwise relative residual target
        max_iterations: Newton iteration cap

    Returns:
        sigma at the grid nodes

    Raises:
        SolverError: If damped Newton fails to converge
    """
    if R <= 0.0:
        raise SolverError(f"radius must be positive, got {R}")
    sigma, history = _newton_profile(f, R, _as_unit(grid), initial, tol, max_iterations)
    logger.debug("nutrient profile at R=%g converged in %d steps", R, len(history) - 1)
    return sigma


def growth_integral(
    g: RateFunction, sigma: np.ndarray, R: float, grid: RadialGrid
) -> float:
    """Integral of g(sigma(r)) r^2 over [0, R] on the grid's quadrature."""
    unit = _as_unit(grid)
    return R**3 * unit.integrate(g.values(sigma) * unit.nodes**2)


def velocity_profile(
    g: RateFunction, sigma: np.ndarray, R: float, grid: RadialGrid
) -> np.ndarray:
    """
    Radial velocity v(r) = r^-2 * integral_0^r g(sigma(s)) s^2 ds.

    The antiderivative is obtained by inverting the first-derivative matrix
    on odd functions, which is nonsingular and fixes the value 0 at r = 0.
    """
    unit = _as_unit(grid)
    s = unit.nodes
    antiderivative = np.linalg.solve(unit.diff_matrix(1, -1), g.values(sigma) * s**2)
    return R * antiderivative / s**2


def pressure_profile(
    v: np.ndarray, g: RateFunction, sigma: np.ndarray, gamma: float
) -> np.ndarray:
    """
    Stationary pressure on the unit ball.

    The stationary velocity is a gradient field, so the momentum balance
    integrates exactly to p = (4/3) g(sigma) + gamma.
    """
    return (4.0 / 3.0) * g.values(sigma) + gamma


def _boundary_slope(sigma: np.ndarray, R: float, grid: RadialGrid) -> float:
    unit = _as_unit(grid)
    return float(unit.boundary_row(1, 1) @ sigma) / R


def stationary_residuals(state: StationaryState) -> dict:
    """
    Residuals of the radial nutrient, divergence and momentum equations.

    Nutrient residuals are componentwise relative; the others are absolute
    and measured in units of max|g|.
    """
    unit = _as_unit(state.grid)
    R = state.radius
    r2 = R * R
    g_vals = state.g.values(state.sigma)
    g_scale = max(1.0, float(np.max(np.abs(g_vals))))

    rhs = r2 * state.f.values(state.sigma)
    nutrient = _scaled_residual(unit.mode_operator(0), state.sigma, rhs)

    s = unit.nodes
    flux = np.linalg.solve(unit.diff_matrix(1, -1), g_vals * s**2)
    div = unit.diff_matrix(1, -1) @ (s**2 * state.v / R) / s**2 - g_vals
    stationarity = abs(float(flux[-1])) * R**3

    residuals = {
        "nutrient": float(np.max(nutrient)),
        "divergence": float(np.max(np.abs(div))) / g_scale,
        "stationarity": stationarity / g_scale,
        "boundary": abs(float(state.sigma[-1]) - 1.0),
    }
    if state.p is not None and state.gamma is not None:
        momentum = state.p - (4.0 / 3.0) * g_vals - state.gamma
        residuals["momentum"] = float(np.max(np.abs(momentum))) / g_scale
    return residuals


def find_stationary_radius(
    f: RateFunction,
    g: RateFunction,
    n: int = DEFAULT_N,
    window: Tuple[float, float] = DEFAULT_WINDOW,
    scan_points: int = DEFAULT_SCAN_POINTS,
    root_tol: float = 1e-14,
    max_iterations: int = 50,
) -> StationaryState:
    """
    Locate the stationary radius and build the unscaled stationary state.

    The sign of the growth integral is scanned over a geometric radius grid
    (warm-starting Newton from the previous profile) and the bracketed zero
    is refined with Brent's method.

    Args:
        f: Consumption rate
        g: Proliferation rate
        n: Chebyshev node count
        window: Radius search window (R_min, R_max)
        scan_points: Number of geometric scan points
        root_tol: Absolute tolerance on R_s
        max_iterations: Newton iteration cap per profile

    Returns:
        Unscaled StationaryState on [0, R_s]

    Raises:
        AssumptionError: If the rate laws violate the standing assumptions
        SolverError: If no sign change is found in the window
    """
    validate_assumptions(f, g).raise_for_failure()
    grid = unit_grid(n)
    s2w = grid.nodes**2 * grid.weights

    def shape(R: float, start: np.ndarray) -> Tuple[float, np.ndarray]:
        sigma, _ = _newton_profile(f, R, grid, start, max_iterations=max_iterations)
        return float(g.values(sigma) @ s2w), sigma

    radii = np.geomspace(window[0], window[1], scan_points)
    profile = np.ones(grid.n)
    prev_value, prev_profile, bracket = None, profile, None
    for R in radii:
        value, profile = shape(R, profile)
        if prev_value is not None and np.sign(value) != np.sign(prev_value):
            bracket = (prev_R, R, prev_profile)
            break
        if value == 0.0:
            bracket = (R, R, profile)
            break
        prev_R, prev_value, prev_profile = R, value, profile

    if bracket is None:
        raise SolverError(
            f"no stationary radius in search window [{window[0]}, {window[1]}]"
        )
    lo, hi, warm = bracket
    logger.info("stationary radius bracketed in [%.6g, %.6g]", lo, hi)

    latest = {"profile": warm}

    def objective(R: float) -> float:
        value, latest["profile"] = shape(R, latest["profile"].copy())
        return value

    if lo == hi:
        R_s = lo
    else:
        sol = root_scalar(objective, bracket=(lo, hi), method="brentq", xtol=root_tol)
        R_s = float(sol.root)

    sigma, _ = _newton_profile(
        f, R_s, grid, latest["profile"], max_iterations=max_iterations
    )
    phys_grid = RadialGrid(n, "chebyshev-lobatto", R_s)
    state = StationaryState(
        radius=R_s,
        grid=phys_grid,
        sigma=sigma,
        sigma_prime_1=_boundary_slope(sigma, R_s, grid),
        v=velocity_profile(g, sigma, R_s, grid),
        f=f,
        g=g,
    )
    state = replace(state, residuals=stationary_residuals(state))
    logger.info("stationary radius R_s=%.12g", R_s)
    return state


def rescale_to_unit(
    state: StationaryState, gamma: Optional[float] = None
) -> StationaryState:
    """
    Map a stationary state to the unit ball.

    Radii become r / R_s and the rate laws are multiplied by R_s**2 so the
    unit-ball equations hold verbatim. When ``gamma`` (unit-ball units) is
    given the pressure profile is filled in.
    """
    R = state.radius
    f_hat = state.f.scaled(R * R)
    g_hat = state.g.scaled(R * R)
    grid = _as_unit(state.grid)
    physical = state.physical_radius if state.physical_radius is not None else R
    gamma = gamma if gamma is not None else state.gamma
    v = velocity_profile(g_hat, state.sigma, 1.0, grid)
    rescaled = StationaryState(
        radius=1.0,
        grid=grid,
        sigma=state.sigma.copy(),
        sigma_prime_1=state.sigma_prime_1 * R,
        v=v,
        f=f_hat,
        g=g_hat,
        p=None if gamma is None else pressure_profile(v, g_hat, state.sigma, gamma),
        gamma=gamma,
        physical_radius=physical,
    )
    return replace(rescaled, residuals=stationary_residuals(rescaled))


def refine_state(state: StationaryState, n: int) -> StationaryState:
    """Re-solve a unit-ball stationary state on an n-node Chebyshev grid."""
    if state.grid.n == n:
        return state
    grid = unit_grid(n)
    start = state.grid.interpolate(state.sigma, grid.nodes * state.grid.radius)
    sigma = solve_nutrient_profile(state.f, state.radius, grid, initial=start)
    v = velocity_profile(state.g, sigma, state.radius, grid)
    refined = replace(
        state,
        grid=grid if state.radius == 1.0 else RadialGrid(n, radius=state.radius),
        sigma=sigma,
        sigma_prime_1=_boundary_slope(sigma, state.radius, grid),
        v=v,
        p=(
            None
            if state.gamma is None
            else pressure_profile(v, state.g, sigma, state.gamma)
        ),
    )
    return replace(refined, residuals=stationary_residuals(refined))


def evaluate_profile(state: StationaryState, r) -> np.ndarray:
    """Interpolate the stationary nutrient profile at radii in [0, radius]."""
    return state.grid.interpolate(state.sigma, r, parity=1)
