"""
Perturbed-sphere geometry.

The perturbed boundary is the graph r = 1 + rho(omega). Its mean curvature
is taken with the sign convention kappa = 1 on the unit sphere (nonnegative
for convex surfaces). The Hanzawa map

    Phi(x) = x + chi(|x| - 1) Pi_1(rho)(x) x / |x|

pulls the perturbed domain back to the unit ball, where Pi_1(rho) is the
harmonic extension sum c_lm r^l Y_lm.
"""

import logging
from typing import Optional, Tuple

import numpy as np

from ..errors import InvalidSpecError
from ..models.surfaces import HanzawaMapSpec, SphereFunction, SurfaceField, check_delta
from ..tools.harmonics import (
    SphereGrid,
    degree_order_pairs,
    real_ylm,
    sphere_grid,
    tangent_frame,
)

logger = logging.getLogger(__name__)

CUTOFF_PROFILE = "c2-plateau-a0.2"
#: Fraction of the ramp spent turning the slope on and off.
RAMP_FRACTION = 0.2
_PEAK = 1.0 / (1.0 - RAMP_FRACTION)


def _smoothstep(t):
    return t * t * (3.0 - 2.0 * t)


def _smoothstep_integral(t):
    return t**3 - 0.5 * t**4


def _ramp(u: np.ndarray) -> np.ndarray:
    """Monotone C^2 transition from 0 at u = 0 to 1 at u = 1."""
    a, P = RAMP_FRACTION, _PEAK
    u = np.clip(u, 0.0, 1.0)
    head = P * a * _smoothstep_integral(u / a)
    middle = 0.5 * P * a + P * (u - a)
    tail = 1.0 - P * a * _smoothstep_integral((1.0 - u) / a)
    return np.where(u < a, head, np.where(u <= 1.0 - a, middle, tail))


def _ramp_slope(u: np.ndarray) -> np.ndarray:
    a, P = RAMP_FRACTION, _PEAK
    inside = (u > 0.0) & (u < 1.0)
    u = np.clip(u, 0.0, 1.0)
    slope = np.where(
        u < a,
        P * _smoothstep(u / a),
        np.where(u <= 1.0 - a, P, P * _smoothstep((1.0 - u) / a)),
    )
    return np.where(inside, slope, 0.0)


def cutoff(tau, delta: float = 0.1) -> np.ndarray:
    """
    Cutoff chi: 1 for |tau| <= delta, 0 for |tau| >= 3 delta.

    The transition has max |chi'| = 1.25 / (2 delta) < 2 / (3 delta).
    """
    check_delta(delta)
    u = (np.abs(np.asarray(tau, dtype=float)) - delta) / (2.0 * delta)
    return 1.0 - _ramp(u)


def cutoff_derivative(tau, delta: float = 0.1) -> np.ndarray:
    check_delta(delta)
    tau = np.asarray(tau, dtype=float)
    u = (np.abs(tau) - delta) / (2.0 * delta)
    return -np.sign(tau) * _ramp_slope(u) / (2.0 * delta)


def _spherical(x: np.ndarray) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    x = np.asarray(x, dtype=float)
    r = np.linalg.norm(x, axis=-1)
    safe = np.where(r > 0.0, r, 1.0)
    theta = np.arccos(np.clip(x[..., 2] / safe, -1.0, 1.0))
    phi = np.arctan2(x[..., 1], x[..., 0])
    return r, theta, phi


def harmonic_extension(rho: SphereFunction, x, dr: int = 0) -> np.ndarray:
    """
    Pi_1(rho)(x) = sum c_lm |x|^l Y_lm(x/|x|), or its radial derivative.

    Args:
        rho: Boundary function
        x: Points, shape (..., 3)
        dr: 0 for the value, 1 for the derivative in |x|
    """
    r, theta, phi = _spherical(x)
    out = np.zeros_like(r)
    for (l, m), c in zip(degree_order_pairs(rho.L), rho.coeffs):
        if c == 0.0:
            continue
        if dr == 0:
            radial = r**l
        elif l == 0:
            continue
        else:
            radial = l * r ** (l - 1)
        out = out + c * radial * real_ylm(l, m, theta, phi)
    return out


def hanzawa_map(spec: HanzawaMapSpec, x) -> np.ndarray:
    """
    Apply the Hanzawa map to points of R^3.

    Raises:
        InvalidSpecError: If sup|rho| >= delta
    """
    spec.validate()
    x = np.asarray(x, dtype=float)
    r = np.linalg.norm(x, axis=-1)
    chi = cutoff(r - 1.0, spec.delta)
    shift = np.zeros_like(r)
    active = chi != 0.0
    if np.any(active):
        shift[active] = chi[active] * harmonic_extension(spec.rho, x[active])
    safe = np.where(r > 0.0, r, 1.0)
    return x + (shift / safe)[..., None] * x


def hanzawa_jacobian(spec: HanzawaMapSpec, x) -> np.ndarray:
    """
    Jacobian determinant of the Hanzawa map.

    The map moves points along rays, r -> R(r, omega), so the determinant is
    (R / r)^2 dR/dr.
    """
    spec.validate()
    x = np.asarray(x, dtype=float)
    r = np.linalg.norm(x, axis=-1)
    tau = r - 1.0
    P = harmonic_extension(spec.rho, x)
    dP = harmonic_extension(spec.rho, x, dr=1)
    R = r + cutoff(tau, spec.delta) * P
    dR = 1.0 + cutoff_derivative(tau, spec.delta) * P + cutoff(tau, spec.delta) * dP
    ratio = np.where(r > 0.0, R / np.where(r > 0.0, r, 1.0), 1.0)
    return ratio**2 * dR


def check_diffeomorphism(
    spec: HanzawaMapSpec, n_radial: int = 41, grid: Optional[SphereGrid] = None
) -> float:
    """
    Minimum Jacobian determinant over the cutoff band.

    Raises:
        InvalidSpecError: If the determinant is not positive somewhere
    """
    grid = grid or sphere_grid(max(2 * spec.rho.L, 8))
    band = 3.0 * spec.delta
    radii = np.linspace(max(0.0, 1.0 - band), 1.0 + band, n_radial)
    omega = grid.directions()
    points = radii[:, None, None] * omega[None, :, :]
    det = hanzawa_jacobian(spec, points)
    worst = float(np.min(det))
    logger.debug("Hanzawa map: min Jacobian %.6g", worst)
    if worst <= 0.0:
        raise InvalidSpecError(
            f"Hanzawa map is not a diffeomorphism: min Jacobian {worst:.3e}"
        )
    return worst


def _surface_derivatives(rho: SphereFunction, grid: SphereGrid):
    return {
        "h": 1.0 + rho.on_grid(grid),
        "t": rho.on_grid(grid, dtheta=1),
        "p": rho.on_grid(grid, dphi=1),
        "tt": rho.on_grid(grid, dtheta=2),
        "tp": rho.on_grid(grid, dtheta=1, dphi=1),
        "pp": rho.on_grid(grid, dphi=2),
    }


def normal_perturbed(
    rho: SphereFunction, exact: bool = True, grid: Optional[SphereGrid] = None
) -> SurfaceField:
    """
    Outward unit normal of r = 1 + rho, or its linearization n0 - grad rho.
    """
    grid = grid or sphere_grid(max(2 * rho.L, 16))
    omega, e_t, e_p = tangent_frame(grid.theta, grid.phi)
    st = np.sin(grid.theta)
    rho_t = rho.on_grid(grid, dtheta=1)
    rho_p = rho.on_grid(grid, dphi=1) / st
    if exact:
        h = 1.0 + rho.on_grid(grid)
        vec = h[:, None] * omega - rho_t[:, None] * e_t - rho_p[:, None] * e_p
        values = vec / np.linalg.norm(vec, axis=-1, keepdims=True)
    else:
        values = omega - rho_t[:, None] * e_t - rho_p[:, None] * e_p
    return SurfaceField(grid, values, {"exact": exact})


def _exact_curvature(rho: SphereFunction, grid: SphereGrid) -> np.ndarray:
    d = _surface_derivatives(rho, grid)
    st, ct = np.sin(grid.theta), np.cos(grid.theta)
    sp, cp = np.sin(grid.phi), np.cos(grid.phi)
    omega, w_t, _ = tangent_frame(grid.theta, grid.phi)
    w_p = np.stack([-st * sp, st * cp, np.zeros_like(st)], axis=-1)
    w_tp = np.stack([-ct * sp, ct * cp, np.zeros_like(st)], axis=-1)
    w_pp = np.stack([-st * cp, -st * sp, np.zeros_like(st)], axis=-1)

    def col(a):
        return a[:, None]

    h = d["h"]
    X_t = col(d["t"]) * omega + col(h) * w_t
    X_p = col(d["p"]) * omega + col(h) * w_p
    X_tt = col(d["tt"]) * omega + 2.0 * col(d["t"]) * w_t - col(h) * omega
    X_tp = col(d["tp"]) * omega + col(d["t"]) * w_p + col(d["p"]) * w_t + col(h) * w_tp
    X_pp = col(d["pp"]) * omega + 2.0 * col(d["p"]) * w_p + col(h) * w_pp

    normal = np.cross(X_t, X_p)
    normal /= np.linalg.norm(normal, axis=-1, keepdims=True)
    E = np.einsum("ij,ij->i", X_t, X_t)
    F = np.einsum("ij,ij->i", X_t, X_p)
    G = np.einsum("ij,ij->i", X_p, X_p)
    e = np.einsum("ij,ij->i", X_tt, normal)
    f = np.einsum("ij,ij->i", X_tp, normal)
    g = np.einsum("ij,ij->i", X_pp, normal)
    H = (e * G - 2.0 * f * F + g * E) / (2.0 * (E * G - F * F))
    return -H


def mean_curvature_perturbed(
    rho: SphereFunction, exact: bool = True, grid: Optional[SphereGrid] = None
) -> SurfaceField:
    """
    Mean curvature of r = 1 + rho sampled on a sphere grid.

    The exact mode uses the first and second fundamental forms of the
    parametrization (1 + rho) omega; the linearized mode evaluates
    1 - (rho + Laplace_w rho / 2), i.e. 1 - sum (1 - l(l+1)/2) c_lm Y_lm.
    """
    grid = grid or sphere_grid(max(2 * rho.L, 16))
    if exact:
        values = _exact_curvature(rho, grid)
    else:
        perturbation = rho.apply_multiplier(lambda l: 1.0 - l * (l + 1) / 2.0)
        values = 1.0 - perturbation.on_grid(grid)
    return SurfaceField(grid, values, {"exact": exact})


def curvature_perturbation_multiplier(l: int) -> float:
    """Per-degree coefficient of the first-order curvature change, -(1 - l(l+1)/2)."""
    return -(1.0 - l * (l + 1) / 2.0)
