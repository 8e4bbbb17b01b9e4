"""
Time-domain checks of the computed spectra.

Two evolutions are provided: the linear modal system generated by a
ModalBlockOperator, and the nonlinear radially symmetric free-boundary
problem

    eps sigma_t = Laplace sigma - f(sigma)   in |x| < R(t),  sigma = 1 on |x| = R(t)
    R'(t) = R^-2 * integral_0^R g(sigma) r^2 dr

posed on the fixed interval s = r / R(t). In the moving coordinate the
nutrient equation picks up the advection term s (R'/R) sigma_s.
"""

import logging
from typing import Optional, Sequence, Tuple

import numpy as np
import scipy.linalg
from scipy.integrate import solve_ivp, trapezoid

from ..errors import ConfigurationError, SolverError
from ..models.profiles import (
    LinearModalTrajectory,
    ModalBlockOperator,
    RadialFrontState,
    RadialTrajectory,
)
from ..models.rates import RateFunction
from ..tools.chebyshev import unit_grid
from ..tools.fitting import DEFAULT_SKIP_FRACTION, fit_exponential_rate
from .stationary import solve_nutrient_profile

logger = logging.getLogger(__name__)

STEPPERS = ("bdf2", "rk4")
DEFAULT_SIM_NODES = 48
DEFAULT_RADIUS_BOUNDS = (0.2, 5.0)


def _time_grid(T: float, dt: float) -> np.ndarray:
    if T <= 0.0 or dt <= 0.0:
        raise ConfigurationError(f"horizon and step must be positive (T={T}, dt={dt})")
    steps = int(round(T / dt))
    if steps < 2:
        raise ConfigurationError(f"horizon T={T} holds fewer than two steps of dt={dt}")
    return dt * np.arange(steps + 1)


def _bdf2(M: np.ndarray, x0: np.ndarray, times: np.ndarray) -> np.ndarray:
    dt = times[1] - times[0]
    eye = np.eye(M.shape[0])
    out = np.empty((times.size, x0.size))
    out[0] = x0
    # backward Euler start, then BDF2 with a fixed factorization
    be = scipy.linalg.lu_factor(eye - dt * M)
    out[1] = scipy.linalg.lu_solve(be, x0)
    lu = scipy.linalg.lu_factor(1.5 * eye - dt * M)
    for k in range(1, times.size - 1):
        out[k + 1] = scipy.linalg.lu_solve(lu, 2.0 * out[k] - 0.5 * out[k - 1])
    return out


def _rk4(M: np.ndarray, x0: np.ndarray, times: np.ndarray) -> np.ndarray:
    dt = times[1] - times[0]
    out = np.empty((times.size, x0.size))
    out[0] = x = x0
    for k in range(times.size - 1):
        k1 = M @ x
        k2 = M @ (x + 0.5 * dt * k1)
        k3 = M @ (x + 0.5 * dt * k2)
        k4 = M @ (x + dt * k3)
        x = x + dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        out[k + 1] = x
    return out


def evolve_linear_mode(
    op: ModalBlockOperator,
    init: Tuple[np.ndarray, float],
    T: float,
    dt: float,
    stepper: str = "bdf2",
    skip_fraction: float = DEFAULT_SKIP_FRACTION,
) -> LinearModalTrajectory:
    """
    Integrate d(phi, c)/dt = M (phi, c) for one mode.

    Args:
        op: Assembled modal operator
        init: (phi0 at the interior nodes, c0)
        T: Horizon
        dt: Step
        stepper: "bdf2" (L-stable, default) or "rk4"
        skip_fraction: Transient fraction excluded from the rate fit

    Returns:
        LinearModalTrajectory with the fitted rate of |c|

    Raises:
        ConfigurationError: Unknown stepper, or rk4 with dt above the
            explicit limit 1 / (2 max|lambda|)
    """
    if stepper not in STEPPERS:
        raise ConfigurationError(
            f"unknown stepper {stepper!r}; expected one of {STEPPERS}"
        )
    phi0, c0 = init
    x0 = np.concatenate([np.asarray(phi0, dtype=float), [float(c0)]])
    if x0.size != op.matrix.shape[0]:
        raise ConfigurationError(
            f"initial data has {x0.size} entries, operator expects {op.matrix.shape[0]}"
        )
    times = _time_grid(T, dt)

    if stepper == "rk4":
        radius = float(np.max(np.abs(scipy.linalg.eigvals(op.matrix))))
        limit = 1.0 / (2.0 * radius)
        if dt > limit:
            raise ConfigurationError(
                f"rk4 step dt={dt} exceeds the explicit limit {limit:.3e} "
                f"(epsilon={op.epsilon}); use bdf2",
                details=[{"dt": dt, "limit": limit}],
            )
        states = _rk4(op.matrix, x0, times)
    else:
        states = _bdf2(op.matrix, x0, times)

    c = states[:, -1]
    phi_norm = np.max(np.abs(states[:, :-1]), axis=1)
    rate, r2 = fit_exponential_rate(times, np.abs(c), skip_fraction)
    logger.info("linear mode l=%d: fitted rate %.8g (r2=%.6f)", op.l, rate, r2)
    return LinearModalTrajectory(
        l=op.l,
        times=times,
        c_values=c,
        phi_norms=phi_norm,
        fitted_rate=rate,
        fit_r2=r2,
    )


def _volume_residuals(
    times: np.ndarray, radii: np.ndarray, growth: np.ndarray
) -> np.ndarray:
    """(R^3/3)(t_k+1) - (R^3/3)(t_k) - trapezoid of R^3 * int g s^2 per step."""
    vol = radii**3 / 3.0
    flux = np.array(
        [trapezoid(growth[k : k + 2], times[k : k + 2]) for k in range(times.size - 1)]
    )
    return np.diff(vol) - flux


def simulate_radial_nonlinear(
    f: RateFunction,
    g: RateFunction,
    epsilon: float,
    R0: float,
    T: float,
    dt: float,
    sigma0: Optional[np.ndarray] = None,
    n: int = DEFAULT_SIM_NODES,
    radius_bounds: Optional[Sequence[float]] = None,
    reference_radius: Optional[float] = None,
    rtol: float = 1e-10,
    atol: float = 1e-12,
) -> RadialTrajectory:
    """
    Evolve the radially symmetric free-boundary problem.

    For epsilon > 0 the method-of-lines system (interior sigma values plus R)
    is integrated with the implicit Radau method; for epsilon = 0 the nutrient
    profile is solved quasi-statically at every right-hand-side evaluation and
    only R is integrated.

    Args:
        f, g: Rate laws in the units of R0
        epsilon: Time-scale ratio (>= 0)
        R0: Initial radius
        T: Horizon
        dt: Output spacing
        sigma0: Initial profile on the n-node unit grid (defaults to the
            quasi-static profile at R0)
        n: Radial nodes
        radius_bounds: (R_min, R_max); leaving it ends the run with status
            "blow-up"
        reference_radius: Radius used for the running rate column

    Returns:
        RadialTrajectory
    """
    if epsilon < 0.0:
        raise ConfigurationError(f"epsilon must be nonnegative, got {epsilon}")
    if R0 <= 0.0:
        raise ConfigurationError(f"initial radius must be positive, got {R0}")
    r_min, r_max = radius_bounds if radius_bounds is not None else (
        DEFAULT_RADIUS_BOUNDS[0] * R0,
        DEFAULT_RADIUS_BOUNDS[1] * R0,
    )
    if not 0.0 < r_min < R0 < r_max:
        raise ConfigurationError(
            f"R0={R0} must lie inside the window ({r_min}, {r_max})"
        )
    times = _time_grid(T, dt)
    grid = unit_grid(n)
    s = grid.nodes
    sw = grid.weights * s**2
    warm = {"profile": None}

    def quasi_static(R: float) -> np.ndarray:
        profile = solve_nutrient_profile(f, R, grid, initial=warm["profile"])
        warm["profile"] = profile
        return profile

    if sigma0 is None:
        sigma0 = quasi_static(R0)
    sigma0 = np.array(sigma0, dtype=float)
    if sigma0.shape != (n,):
        raise ConfigurationError(f"sigma0 must have {n} values, got {sigma0.shape}")
    if abs(sigma0[-1] - 1.0) > 1e-12:
        raise ConfigurationError("sigma0 must equal 1 at the boundary")

    def leave_low(t, y):
        return y[-1] - r_min

    def leave_high(t, y):
        return r_max - y[-1]

    leave_low.terminal = leave_high.terminal = True

    if epsilon > 0.0:
        op = grid.mode_operator(0)
        d1 = grid.diff_matrix(1, 1)

        def rhs(t, y):
            u = np.append(y[:-1], 1.0)
            R = y[-1]
            Rdot = R * float(g.values(u) @ sw)
            du = (op @ u / R**2 - f.values(u)) / epsilon + s * (Rdot / R) * (d1 @ u)
            return np.append(du[:-1], Rdot)

        y0 = np.append(sigma0[:-1], R0)
        sol = solve_ivp(
            rhs,
            (times[0], times[-1]),
            y0,
            method="Radau",
            t_eval=times,
            events=(leave_low, leave_high),
            rtol=rtol,
            atol=atol,
        )
        profiles = [np.append(col[:-1], 1.0) for col in sol.y.T]
        radii = sol.y[-1]
    else:

        def rhs(t, y):
            R = y[0]
            return [R * float(g.values(quasi_static(R)) @ sw)]

        warm["profile"] = sigma0
        sol = solve_ivp(
            rhs,
            (times[0], times[-1]),
            [R0],
            method="DOP853",
            t_eval=times,
            events=(leave_low, leave_high),
            rtol=rtol,
            atol=atol,
        )
        radii = sol.y[0]
        profiles = []
        for R in radii:
            profiles.append(quasi_static(float(R)))
        profiles[0] = sigma0

    if sol.status < 0:
        raise SolverError(f"radial evolution failed: {sol.message}")
    status = "blow-up" if sol.status == 1 else "completed"
    if status == "blow-up":
        logger.warning("radius left (%g, %g) at t=%.6g", r_min, r_max, sol.t[-1])

    t_out = sol.t
    growth = np.array([R**3 * float(g.values(u) @ sw) for R, u in zip(radii, profiles)])
    states = [
        RadialFrontState(t=float(t), R=float(R), sigma=u)
        for t, R, u in zip(t_out, radii, profiles)
    ]
    centers = np.array([float(grid.interpolate(u, 0.0, parity=1)) for u in profiles])
    return RadialTrajectory(
        states=states,
        grid=grid,
        epsilon=epsilon,
        status=status,
        sigma_center=centers,
        volume_residuals=_volume_residuals(t_out, radii, growth),
        reference_radius=reference_radius,
    )


def fit_radial_rate(
    trajectory: RadialTrajectory,
    reference_radius: Optional[float] = None,
    skip_fraction: float = DEFAULT_SKIP_FRACTION,
) -> Tuple[float, float]:
    """Exponential rate of |R(t) - R_ref| along a radial trajectory."""
    ref = reference_radius
    if ref is None:
        ref = trajectory.reference_radius
    if ref is None:
        raise ConfigurationError("a reference radius is needed to fit a radial rate")
    return fit_exponential_rate(
        trajectory.times, np.abs(trajectory.radii - ref), skip_fraction
    )
