"""
Explicit modal spectrum of the linearized problem.

For each spherical-harmonic degree l the boundary perturbation evolves, in
the limit epsilon -> 0, with a scalar rate. The rates follow from the
profiles F_l, solutions of

    F_l'' + (2/r) F_l' - l(l+1) F_l / r^2 = f'(sigma_s) F_l,  F_l(1) = -sigma_s'(1),

through closed quadrature formulas. All inputs are unit-ball stationary
states.
"""

import logging
from concurrent.futures import ThreadPoolExecutor
from typing import List, Optional

import numpy as np

from ..errors import ConfigurationError
from ..models.profiles import StationaryState
from ..models.rates import RateFunction
from ..models.summary import SpectralSummary
from ..tools.chebyshev import RadialGrid
from .stationary import refine_state

logger = logging.getLogger(__name__)

DEFAULT_L_MAX = 64
TAIL_WINDOW = 8
#: Extra radial nodes beyond l_max so r^(2l+2)-type integrands stay resolved.
RESOLUTION_MARGIN = 64


def _require_unit(state: StationaryState) -> None:
    if state.radius != 1.0:
        raise ConfigurationError(
            "spectral computations need a stationary state rescaled to the unit ball"
        )


def degeneracy(l: int) -> int:
    """Number of spherical harmonics of degree l."""
    return 2 * l + 1


def gamma_prefactor(l: int) -> float:
    return 4.0 * (2 * l + 3) * (l + 1) / (l * (l + 2) * (2 * l + 1))


def alpha_slope(l: int) -> float:
    """d alpha_l / d gamma."""
    return -(l * (l + 2) * (2 * l + 1)) / (4.0 * (2 * l * l + 4 * l + 3))


def solve_mode_profile(
    l: int, f_prime: np.ndarray, grid: RadialGrid, boundary_value: float = 1.0
) -> np.ndarray:
    """
    Regular solution of [d2 + (2/r) d - l(l+1)/r^2 - f'] u = 0 with u(1) given.

    The parity fold of the grid enforces u ~ r^l at the origin.
    """
    A = grid.mode_operator(l) - np.diag(f_prime)
    A[-1, :] = 0.0
    A[-1, -1] = 1.0
    rhs = np.zeros(grid.n)
    rhs[-1] = boundary_value
    return np.linalg.solve(A, rhs)


def solve_Fl(l: int, state: StationaryState) -> np.ndarray:
    """
    F_l profile on the state's grid.

    Solved with boundary value 1 and scaled by -sigma_s'(1).
    """
    if l < 0:
        raise ConfigurationError(f"degree must be nonnegative, got {l}")
    _require_unit(state)
    kernel = solve_mode_profile(l, state.f.derivative(state.sigma), state.grid)
    return -state.sigma_prime_1 * kernel


def alpha0(
    g: RateFunction, sigma_s: np.ndarray, F0: np.ndarray, grid: RadialGrid
) -> float:
    """Rate of the radial mode: g(1) + integral of g'(sigma_s) F_0 r^2."""
    r = grid.nodes
    return float(g.values(1.0)) + grid.integrate(g.derivative(sigma_s) * F0 * r**2)


def gamma_l(
    l: int, g: RateFunction, sigma_s: np.ndarray, Fl: np.ndarray, grid: RadialGrid
) -> float:
    """
    Neutral surface tension of degree l >= 2.

    Raises:
        ConfigurationError: If l < 2
    """
    if l < 2:
        raise ConfigurationError(f"gamma_l is defined for l >= 2, got l={l}")
    r = grid.nodes
    bracket = float(g.values(1.0)) + grid.integrate(
        g.derivative(sigma_s) * Fl * r ** (l + 2)
    )
    return gamma_prefactor(l) * bracket


def alpha_l_of_gamma(l: int, gamma: float, gamma_l_value: float) -> float:
    """Rate of degree l >= 2 at surface tension gamma."""
    if l < 2:
        raise ConfigurationError(f"alpha_l is defined for l >= 2, got l={l}")
    return alpha_slope(l) * (gamma - gamma_l_value)


def gamma_l_for_state(l: int, state: StationaryState) -> float:
    return gamma_l(l, state.g, state.sigma, solve_Fl(l, state), state.grid)


def alpha0_for_state(state: StationaryState) -> float:
    return alpha0(state.g, state.sigma, solve_Fl(0, state), state.grid)


def bgamma_multiplier(l: int, gamma: float, state: StationaryState) -> float:
    """Fourier multiplier of the linearized boundary operator at degree l."""
    if l == 0:
        return alpha0_for_state(state)
    if l == 1:
        return 0.0
    return alpha_l_of_gamma(l, gamma, gamma_l_for_state(l, state))


def _tail_bound(values: List[float], gamma_star: float) -> bool:
    if len(values) < TAIL_WINDOW:
        return False
    tail = np.asarray(values[-TAIL_WINDOW:])
    return bool(np.all(tail < gamma_star / 10.0) and np.all(np.diff(tail) < 0.0))


def spectral_summary(
    state: StationaryState,
    gamma: Optional[float] = None,
    l_max: int = DEFAULT_L_MAX,
    jobs: int = 1,
) -> SpectralSummary:
    """
    Evaluate gamma_l for l = 2..l_max and assemble the spectral summary.

    The stationary state is re-solved on a grid with at least
    l_max + RESOLUTION_MARGIN nodes. An unmet tail criterion is reported
    through ``tail_bound_met`` and ``warnings``; the summary is still returned.

    Args:
        state: Unit-ball stationary state
        gamma: Surface tension (unit-ball units); optional
        l_max: Truncation degree (>= 2)
        jobs: Worker threads for the per-degree evaluations

    Returns:
        SpectralSummary
    """
    _require_unit(state)
    if l_max < 2:
        raise ConfigurationError(f"l_max must be at least 2, got {l_max}")
    work = refine_state(state, max(state.grid.n, l_max + RESOLUTION_MARGIN))
    degrees = list(range(2, l_max + 1))

    def evaluate(l: int) -> float:
        return gamma_l_for_state(l, work)

    if jobs > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            values = list(pool.map(evaluate, degrees))
    else:
        values = [evaluate(l) for l in degrees]

    a0 = alpha0_for_state(work)
    idx = int(np.argmax(values))
    gamma_star = values[idx]
    warnings = []
    if any(v <= 0.0 for v in values):
        warnings.append("nonpositive gamma_l encountered")
    if a0 >= 0.0:
        warnings.append(f"alpha0 = {a0!r} is not negative")
    tail_ok = _tail_bound(values, gamma_star)
    if not tail_ok:
        warnings.append(
            f"tail criterion unmet at l_max={l_max}: gamma_l is not yet below "
            "gamma_star/10 and decreasing over the last degrees"
        )
        logger.warning(warnings[-1])

    alpha_l = alpha_star = None
    if gamma is not None:
        alpha_l = [alpha_l_of_gamma(l, gamma, v) for l, v in zip(degrees, values)]
        alpha_star = max([a0] + alpha_l)

    return SpectralSummary(
        alpha0=a0,
        degrees=degrees,
        gamma_l=values,
        gamma=gamma,
        alpha_l=alpha_l,
        gamma_star=gamma_star,
        l_star=degrees[idx],
        alpha_star=alpha_star,
        l_max=l_max,
        tail_bound_met=tail_ok,
        sigma_prime_1=work.sigma_prime_1,
        boundary_growth=work.boundary_growth,
        n_radial=work.grid.n,
        warnings=warnings,
    )


def stability_verdict(summary: SpectralSummary, gamma: float) -> str:
    """Classify gamma against the threshold: stable, unstable or neutral."""
    if gamma > summary.gamma_star:
        return "stable"
    if gamma < summary.gamma_star:
        return "unstable"
    return "neutral"
