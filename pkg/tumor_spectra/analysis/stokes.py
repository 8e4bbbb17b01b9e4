"""
Per-mode Stokes solver on the unit ball.

For a degree-l mode the velocity is V = u_r(r) Y e_r + u_t(r) grad_w Y and
the pressure P = p(r) Y. The problem

    -Laplace V + grad P = c grad(phi Y),   div V = phi Y,
    T(V, P) n = h_n Y n + h_t grad_w Y   on r = 1,

with stress T = 2 e(V) - (P + (2/3) div V) I, is solved by writing
V = grad(psi Y) + B grad(r^l Y) + A W_l, where psi carries the divergence
data and A W_l is the regular Lamb solution with pressure A r^l Y. The two
traction conditions fix (A, B); at l = 1 the normal condition degenerates
into the rigid-motion compatibility condition and B (a translation) is
fixed by the zero-mean-velocity constraint.
"""

import logging
from typing import Dict, Iterable, List, Tuple

import numpy as np

from ..errors import ConfigurationError, IncompatibleDataError
from ..models.profiles import ModalStokesProblem, ModalStokesSolution, StationaryState
from ..tools.chebyshev import RadialGrid
from .spectrum import bgamma_multiplier, solve_Fl

logger = logging.getLogger(__name__)

GROWTH_FORCE_COEFF = 1.0 / 3.0
COMPATIBILITY_TOL = 1e-9


def _lamb_coefficients(l: int) -> Tuple[float, float]:
    a = (l + 3) / (2.0 * (l + 1) * (2 * l + 3))
    b = -l / ((l + 1) * (2.0 * l + 3))
    return a, b


def effective_pressure_coeff(c: float) -> float:
    """Weight of phi(1) in the normal traction: P + (2/3) div V at the boundary."""
    return 1.0 + c + 2.0 / 3.0


def _solve_coefficients(
    l: int,
    grid: RadialGrid,
    phi: np.ndarray,
    c: float,
    h_n,
    h_t,
) -> Dict[str, np.ndarray]:
    """Potential psi and homogeneous coefficients (A, B) for each data column."""
    parity = 1 if l % 2 == 0 else -1
    op = grid.mode_operator(l).copy()
    op[-1, :] = 0.0
    op[-1, -1] = 1.0
    rhs = np.array(phi, dtype=float, copy=True)
    rhs[-1, ...] = 0.0
    psi = np.linalg.solve(op, rhs)

    d1 = grid.boundary_row(1, parity) @ psi
    d2 = grid.boundary_row(2, parity) @ psi
    phi1 = phi[-1, ...]
    pcoef = effective_pressure_coeff(c)
    a, b = _lamb_coefficients(l)
    h_n = np.broadcast_to(np.asarray(h_n, dtype=float), np.shape(d1))
    h_t = np.broadcast_to(np.asarray(h_t, dtype=float), np.shape(d1))

    # normal:     2 u_r'(1) - pcoef phi(1) - A = h_n
    # tangential: u_t'(1) - u_t(1) + u_r(1) = h_t
    rn = h_n - 2.0 * d2 + pcoef * phi1
    rt = h_t - 2.0 * d1
    cnA = 2.0 * (a * l + b) * (l + 1) - 1.0
    cnB = 2.0 * l * (l - 1)
    ctA = 2.0 * a * l + b
    ctB = 2.0 * (l - 1)

    if l == 0:
        A = rn / cnA
        B = np.zeros_like(A)
    elif l == 1:
        # net force balance of the translation mode
        mismatch = (h_n + 2.0 * h_t) - (1.0 / 3.0 - c) * phi1
        scale = np.maximum(1.0, np.maximum(np.abs(h_n), np.abs(h_t)))
        scale = np.maximum(scale, np.max(np.abs(phi), axis=0))
        if np.any(np.abs(mismatch) > COMPATIBILITY_TOL * scale):
            raise IncompatibleDataError(
                "incompatible rigid-motion data: net force on the degree-1 mode "
                f"(mismatch {np.max(np.abs(mismatch)):.3e})"
            )
        A = rt / ctA
        r = grid.nodes[:, None] if psi.ndim == 2 else grid.nodes
        u0 = grid.diff_matrix(1, parity) @ psi
        t0 = psi / r
        mean0 = grid.weights @ (r**2 * (u0 + 2.0 * t0))
        B = -mean0 - A * (3.0 * a + b) / 5.0
    else:
        det = cnA * ctB - cnB * ctA
        A = (rn * ctB - cnB * rt) / det
        B = (cnA * rt - rn * ctA) / det
    return {"psi": psi, "A": A, "B": B, "d1": d1}


def _require_grid(grid: RadialGrid, source: np.ndarray) -> None:
    if not grid.is_spectral or grid.radius != 1.0:
        raise ConfigurationError("modal Stokes solves need a unit Chebyshev grid")
    if np.shape(source)[0] != grid.n:
        raise ConfigurationError(
            f"source has {np.shape(source)[0]} values for a {grid.n}-node grid"
        )


def solve_modal_stokes(
    problem: ModalStokesProblem, grid: RadialGrid
) -> ModalStokesSolution:
    """
    Solve one spheroidal Stokes mode on the unit ball.

    Args:
        problem: Degree, divergence data, force coefficient and traction data
        grid: Unit Chebyshev grid carrying the source values

    Returns:
        ModalStokesSolution with u_r, u_t, p and u_r(1)

    Raises:
        IncompatibleDataError: Degree-1 data with a net force
    """
    l = problem.l
    if l < 0:
        raise ConfigurationError(f"degree must be nonnegative, got {l}")
    phi = np.asarray(problem.source, dtype=float)
    _require_grid(grid, phi)
    c = problem.body_force_grad_coeff
    sol = _solve_coefficients(
        l, grid, phi, c, problem.traction_normal, problem.traction_tangent
    )
    psi, A, B = sol["psi"], sol["A"], sol["B"]
    parity = 1 if l % 2 == 0 else -1
    a, b = _lamb_coefficients(l)
    r = grid.nodes if phi.ndim == 1 else grid.nodes[:, None]

    u_r = grid.diff_matrix(1, parity) @ psi + (a * l + b) * A * r ** (l + 1)
    u_t = psi / r + a * A * r ** (l + 1)
    if l >= 1:
        u_r = u_r + B * l * r ** (l - 1)
        u_t = u_t + B * r ** (l - 1)
    p = (1.0 + c) * phi + A * r**l

    return ModalStokesSolution(
        l=l,
        grid=grid,
        u_r=u_r,
        u_t=u_t,
        p=p,
        boundary_normal_velocity=u_r[-1] if phi.ndim == 2 else float(u_r[-1]),
        coefficients={"A": A, "B": B},
    )


def divergence_residual(solution: ModalStokesSolution, source: np.ndarray) -> float:
    """
    Max |u_r' + 2u_r/r - l(l+1)u_t/r - phi| over the interior nodes.

    The boundary node carries the traction conditions instead of the
    collocation equation, so it is left out.
    """
    l, grid = solution.l, solution.grid
    parity = -1 if l % 2 == 0 else 1
    r = grid.nodes
    div = (
        grid.diff_matrix(1, parity) @ solution.u_r
        + 2.0 * solution.u_r / r
        - l * (l + 1) * solution.u_t / r
    )
    return float(np.max(np.abs(div - np.asarray(source))[:-1]))


def modal_J(l: int, v: np.ndarray, state: StationaryState):
    """
    Boundary normal velocity driven by the growth source g'(sigma_s) v.

    ``v`` may be a single profile or an (n, k) stack of profiles, in which
    case k values are returned.
    """
    v = np.asarray(v, dtype=float)
    gp = state.g.derivative(state.sigma)
    source = gp * v if v.ndim == 1 else gp[:, None] * v
    problem = ModalStokesProblem(
        l=l, source=source, body_force_grad_coeff=GROWTH_FORCE_COEFF
    )
    return solve_modal_stokes(problem, state.grid).boundary_normal_velocity


def bgamma_via_stokes(l: int, gamma: float, state: StationaryState) -> float:
    """
    Boundary multiplier at degree l reproduced from a Stokes solve.

    The nutrient perturbation F_l drives the growth source; the curvature
    perturbation gamma (1 - l(l+1)/2) and the stationary stress enter the
    traction.
    """
    phi = solve_Fl(l, state)
    g1 = state.boundary_growth
    problem = ModalStokesProblem(
        l=l,
        source=state.g.derivative(state.sigma) * phi,
        body_force_grad_coeff=GROWTH_FORCE_COEFF,
        traction_normal=gamma * (1.0 - l * (l + 1) / 2.0) + 4.0 * g1,
        traction_tangent=-2.0 * g1,
    )
    u1 = solve_modal_stokes(problem, state.grid).boundary_normal_velocity
    return float(u1) + g1


def oracle_report(
    state: StationaryState, degrees: Iterable[int], gammas: Iterable[float]
) -> List[Dict[str, float]]:
    """Compare formula multipliers with Stokes-solve multipliers."""
    rows = []
    for l in degrees:
        for gamma in gammas:
            formula = bgamma_multiplier(l, gamma, state)
            stokes = bgamma_via_stokes(l, gamma, state)
            # unit floor: the degree-1 multiplier vanishes
            rel = abs(formula - stokes) / max(abs(formula), abs(stokes), 1.0)
            rows.append(
                {
                    "l": l,
                    "gamma": gamma,
                    "multiplier_formula": formula,
                    "multiplier_stokes": stokes,
                    "rel_err": rel,
                }
            )
    logger.debug("oracle report: %d rows", len(rows))
    return rows
