"""
Real spherical harmonics and a product quadrature on the unit sphere.

Associated Legendre functions carry the Condon-Shortley phase (as returned
by scipy.special.lpmv). Real harmonics are

    Y_l0  = N_l0 P_l^0(cos t)
    Y_lm  = sqrt(2) N_lm P_l^m(cos t) cos(m p)      m > 0
    Y_l-m = sqrt(2) N_lm P_l^m(cos t) sin(m p)      m > 0

with N_lm = sqrt((2l+1)/(4 pi) (l-m)!/(l+m)!), orthonormal on the sphere.
Coefficient vectors are ordered by the flat index l^2 + l + m.
"""

import logging
from functools import lru_cache
from typing import Optional, Tuple

import numpy as np
from scipy.special import gammaln, lpmv, roots_legendre

from ..errors import ConfigurationError

logger = logging.getLogger(__name__)


def flat_index(l: int, m: int) -> int:
    return l * l + l + m


def n_coeffs(L: int) -> int:
    return (L + 1) ** 2


def degree_order_pairs(L: int):
    """Yield (l, m) in flat-index order."""
    for l in range(L + 1):
        for m in range(-l, l + 1):
            yield l, m


def laplace_beltrami_multiplier(l: int) -> float:
    """Eigenvalue of the Laplace-Beltrami operator on degree-l harmonics."""
    if l < 0:
        raise ConfigurationError(f"degree must be nonnegative, got {l}")
    return -float(l * (l + 1))


def legendre(l: int, m: int, theta) -> np.ndarray:
    """P_l^m(cos theta) for any integer m; zero when |m| > l."""
    theta = np.asarray(theta, dtype=float)
    if abs(m) > l:
        return np.zeros_like(theta)
    x = np.cos(theta)
    if m >= 0:
        return lpmv(m, l, x)
    k = -m
    factor = (-1.0) ** k * np.exp(gammaln(l - k + 1) - gammaln(l + k + 1))
    return factor * lpmv(k, l, x)


def legendre_dtheta(l: int, m: int, theta, order: int = 1) -> np.ndarray:
    """
    theta-derivatives of P_l^m(cos theta).

    Uses dP_l^m/dtheta = (P_l^{m+1} - (l+m)(l-m+1) P_l^{m-1}) / 2, applied
    ``order`` times.
    """
    if order == 0:
        return legendre(l, m, theta)
    return 0.5 * (
        legendre_dtheta(l, m + 1, theta, order - 1)
        - (l + m) * (l - m + 1) * legendre_dtheta(l, m - 1, theta, order - 1)
    )


def _normalization(l: int, m: int) -> float:
    m = abs(m)
    return np.sqrt(
        (2 * l + 1) / (4.0 * np.pi) * np.exp(gammaln(l - m + 1) - gammaln(l + m + 1))
    )


def _azimuthal(m: int, phi: np.ndarray, order: int) -> np.ndarray:
    if m == 0:
        return np.ones_like(phi) if order == 0 else np.zeros_like(phi)
    k = abs(m)
    shift = order * np.pi / 2.0
    if m > 0:
        return k**order * np.cos(k * phi + shift)
    return k**order * np.sin(k * phi + shift)


def real_ylm(l: int, m: int, theta, phi, dtheta: int = 0, dphi: int = 0) -> np.ndarray:
    """
    Real spherical harmonic Y_lm or one of its coordinate derivatives.

    Args:
        l, m: Degree and order, |m| <= l
        theta: Colatitude
        phi: Longitude
        dtheta: Number of theta-derivatives (0-2)
        dphi: Number of phi-derivatives (0-2)
    """
    if abs(m) > l:
        raise ConfigurationError(f"order m={m} outside [-{l}, {l}]")
    theta = np.asarray(theta, dtype=float)
    phi = np.asarray(phi, dtype=float)
    scale = _normalization(l, m) * (np.sqrt(2.0) if m != 0 else 1.0)
    polar = legendre_dtheta(l, abs(m), theta, dtheta)
    return scale * polar * _azimuthal(m, phi, dphi)


class SphereGrid:
    """
    Gauss-Legendre (in cos theta) x uniform-longitude grid.

    With the default sizes the rule integrates products of two harmonics of
    degree <= L exactly.
    """

    def __init__(
        self, L: int, n_theta: Optional[int] = None, n_phi: Optional[int] = None
    ):
        if L < 0:
            raise ConfigurationError(f"band limit must be nonnegative, got {L}")
        self.L = int(L)
        self.n_theta = int(n_theta or L + 1)
        self.n_phi = int(n_phi or 2 * L + 2)
        if self.n_theta < L + 1 or self.n_phi < 2 * L + 1:
            raise ConfigurationError(
                f"grid {self.n_theta}x{self.n_phi} too coarse for band limit {L}"
            )
        x, w = roots_legendre(self.n_theta)
        theta = np.arccos(x)
        phi = 2.0 * np.pi * np.arange(self.n_phi) / self.n_phi
        T, Pm = np.meshgrid(theta, phi, indexing="ij")
        self.theta = T.ravel()
        self.phi = Pm.ravel()
        self.weights = np.repeat(w, self.n_phi) * (2.0 * np.pi / self.n_phi)
        self._basis = {}

    def __repr__(self) -> str:
        return f"SphereGrid(L={self.L}, n_theta={self.n_theta}, n_phi={self.n_phi})"

    @property
    def size(self) -> int:
        return self.theta.size

    def directions(self) -> np.ndarray:
        """Unit vectors omega at the nodes, shape (size, 3)."""
        st = np.sin(self.theta)
        return np.stack(
            [st * np.cos(self.phi), st * np.sin(self.phi), np.cos(self.theta)], axis=-1
        )

    def basis(self, L: int, dtheta: int = 0, dphi: int = 0) -> np.ndarray:
        """Matrix of sampled harmonics (or derivatives), shape (size, (L+1)^2)."""
        key = (L, dtheta, dphi)
        if key not in self._basis:
            cols = [
                real_ylm(l, m, self.theta, self.phi, dtheta, dphi)
                for l, m in degree_order_pairs(L)
            ]
            self._basis[key] = np.stack(cols, axis=-1)
        return self._basis[key]

    def integrate(self, values: np.ndarray) -> float:
        return float(self.weights @ np.asarray(values, dtype=float))

    def analyze(self, values: np.ndarray, L: Optional[int] = None) -> np.ndarray:
        """Coefficients of sampled values up to degree L (default: grid band limit)."""
        L = self.L if L is None else L
        if L > self.L:
            raise ConfigurationError(
                f"cannot analyze degree {L} on a grid for L={self.L}"
            )
        return self.basis(L).T @ (self.weights * np.asarray(values, dtype=float))

    def synthesize(
        self, coeffs: np.ndarray, dtheta: int = 0, dphi: int = 0
    ) -> np.ndarray:
        coeffs = np.asarray(coeffs, dtype=float)
        L = int(round(np.sqrt(coeffs.size))) - 1
        if n_coeffs(L) != coeffs.size:
            raise ConfigurationError(f"{coeffs.size} is not a valid coefficient count")
        return self.basis(L, dtheta, dphi) @ coeffs

    def gram(self, L: int) -> np.ndarray:
        B = self.basis(L)
        return B.T @ (self.weights[:, None] * B)


@lru_cache(maxsize=16)
def sphere_grid(L: int) -> SphereGrid:
    """Shared grid for band limit L."""
    return SphereGrid(L)


def discrete_laplace_beltrami(
    grid: SphereGrid, values: np.ndarray, L: Optional[int] = None
) -> np.ndarray:
    """
    Laplace-Beltrami of sampled values from coordinate derivatives.

    The samples are expanded to degree L and
    d_tt u + cot(t) d_t u + d_pp u / sin(t)^2 is synthesized at the nodes.
    """
    coeffs = grid.analyze(values, L)
    st = np.sin(grid.theta)
    u_t = grid.synthesize(coeffs, dtheta=1)
    u_tt = grid.synthesize(coeffs, dtheta=2)
    u_pp = grid.synthesize(coeffs, dphi=2)
    return u_tt + np.cos(grid.theta) / st * u_t + u_pp / st**2


def tangent_frame(theta: np.ndarray, phi: np.ndarray) -> Tuple[np.ndarray, ...]:
    """(omega, e_theta, e_phi) as (..., 3) arrays."""
    st, ct = np.sin(theta), np.cos(theta)
    sp, cp = np.sin(phi), np.cos(phi)
    omega = np.stack([st * cp, st * sp, ct], axis=-1)
    e_theta = np.stack([ct * cp, ct * sp, -st], axis=-1)
    e_phi = np.stack([-sp, cp, np.zeros_like(phi)], axis=-1)
    return omega, e_theta, e_phi
