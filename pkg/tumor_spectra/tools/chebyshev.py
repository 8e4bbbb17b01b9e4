"""
Radial grids and spectral operators on [0, R].

Chebyshev-Lobatto grids are built from an odd-degree grid on [-1, 1] and
folded by the parity of the unknown, so only the nodes with x > 0 are kept.
No node sits at the origin, and a radial profile of angular degree l is
represented as the restriction of a function with parity (-1)**l, which is
exactly the regularity class of u(r) Y_lm near r = 0.
"""

import logging
from functools import lru_cache
from typing import Dict, Literal, Tuple

import numpy as np
from scipy.interpolate import CubicSpline, barycentric_interpolate
from scipy.integrate import trapezoid

from ..errors import ConfigurationError

logger = logging.getLogger(__name__)

GridKind = Literal["chebyshev-lobatto", "uniform"]

MIN_NODES = 16


def cheb(N: int) -> Tuple[np.ndarray, np.ndarray]:
    """
    Chebyshev-Lobatto nodes and first-derivative matrix on [-1, 1].

    Nodes are ordered x_0 = 1 > x_1 > ... > x_N = -1.
    """
    k = np.arange(N + 1)
    x = np.cos(np.pi * k / N)
    c = np.ones(N + 1)
    c[0] = c[-1] = 2.0
    c *= (-1.0) ** k
    dx = x[:, None] - x[None, :]
    D = np.outer(c, 1.0 / c) / (dx + np.eye(N + 1))
    D -= np.diag(D.sum(axis=1))
    return x, D


def clenshaw_curtis_weights(N: int) -> np.ndarray:
    """Clenshaw-Curtis weights on the N+1 Chebyshev-Lobatto nodes of [-1, 1]."""
    theta = np.pi * np.arange(N + 1) / N
    w = np.zeros(N + 1)
    interior = np.arange(1, N)
    v = np.ones(N - 1)
    if N % 2 == 0:
        w[0] = w[N] = 1.0 / (N**2 - 1)
        for k in range(1, N // 2):
            v -= 2.0 * np.cos(2 * k * theta[interior]) / (4 * k**2 - 1)
        v -= np.cos(N * theta[interior]) / (N**2 - 1)
    else:
        w[0] = w[N] = 1.0 / N**2
        for k in range(1, (N - 1) // 2 + 1):
            v -= 2.0 * np.cos(2 * k * theta[interior]) / (4 * k**2 - 1)
    w[interior] = 2.0 * v / N
    return w


class RadialGrid:
    """
    Radial grid on [0, R].

    Nodes are strictly increasing and the last node equals R exactly. For the
    Chebyshev kind the first node is the smallest positive Lobatto point of
    the underlying odd-degree grid; for the uniform kind it is 0.
    """

    def __init__(
        self, n: int, kind: GridKind = "chebyshev-lobatto", radius: float = 1.0
    ):
        if n < MIN_NODES:
            raise ConfigurationError(
                f"radial grid needs at least {MIN_NODES} nodes, got {n}"
            )
        if radius <= 0.0:
            raise ConfigurationError(f"grid radius must be positive, got {radius}")
        if kind not in ("chebyshev-lobatto", "uniform"):
            raise ConfigurationError(f"unknown grid kind {kind!r}")

        self.n = int(n)
        self.kind = kind
        self.radius = float(radius)
        self._cache: Dict[Tuple, np.ndarray] = {}

        if kind == "chebyshev-lobatto":
            self.degree = 2 * self.n - 1
            x, D = cheb(self.degree)
            self._x_full = x
            self._D_full = D
            self.nodes = self.radius * x[: self.n][::-1].copy()
            self.nodes[-1] = self.radius
        else:
            self.degree = None
            self.nodes = np.linspace(0.0, self.radius, self.n)

    def __repr__(self) -> str:
        return f"RadialGrid(n={self.n}, kind={self.kind!r}, radius={self.radius})"

    @property
    def is_spectral(self) -> bool:
        return self.kind == "chebyshev-lobatto"

    def with_radius(self, radius: float) -> "RadialGrid":
        return RadialGrid(self.n, self.kind, radius)

    def _require_spectral(self, what: str) -> None:
        if not self.is_spectral:
            raise ConfigurationError(f"{what} needs a chebyshev-lobatto grid")

    def _fold(self, full: np.ndarray, parity: int) -> np.ndarray:
        n = self.n
        folded = full[:n, :n] + parity * full[:n, n:][:, ::-1]
        return folded[::-1, ::-1] / self.radius

    def diff_matrix(self, order: int, parity: int) -> np.ndarray:
        """
        Differentiation matrix acting on functions of the given parity.

        Args:
            order: 1 or 2
            parity: +1 for even functions, -1 for odd ones

        Returns:
            (n, n) matrix in ascending node order
        """
        self._require_spectral("differentiation")
        key = ("D", order, parity)
        if key not in self._cache:
            if order == 1:
                mat = self._fold(self._D_full, parity)
            elif order == 2:
                mat = self._fold(self._D_full @ self._D_full, parity) / self.radius
            else:
                raise ConfigurationError(f"unsupported derivative order {order}")
            self._cache[key] = mat
        return self._cache[key]

    def mode_operator(self, l: int) -> np.ndarray:
        """Radial Laplacian at angular degree l: d2 + (2/r) d - l(l+1)/r^2."""
        key = ("L", l)
        if key not in self._cache:
            parity = 1 if l % 2 == 0 else -1
            r = self.nodes
            op = self.diff_matrix(2, parity)
            op = op + np.diag(2.0 / r) @ self.diff_matrix(1, parity)
            op -= np.diag(l * (l + 1) / r**2)
            self._cache[key] = op
        return self._cache[key]

    @property
    def weights(self) -> np.ndarray:
        """
        Quadrature weights for integrals over [0, R].

        For the Chebyshev kind these integrate even integrands (in r) with
        spectral accuracy; for the uniform kind they are trapezoid weights.
        """
        key = ("w",)
        if key not in self._cache:
            if self.is_spectral:
                w = clenshaw_curtis_weights(self.degree)[: self.n][::-1]
                self._cache[key] = self.radius * w
            else:
                h = self.radius / (self.n - 1)
                w = np.full(self.n, h)
                w[0] = w[-1] = 0.5 * h
                self._cache[key] = w
        return self._cache[key]

    def integrate(self, values: np.ndarray) -> float:
        """Integrate nodal values over [0, R]."""
        values = np.asarray(values, dtype=float)
        if self.is_spectral:
            return float(self.weights @ values)
        return float(trapezoid(values, self.nodes))

    def interpolate(self, values: np.ndarray, r, parity: int = 1):
        """
        Evaluate the grid interpolant of nodal values at arbitrary radii.

        Args:
            values: Nodal values (ascending order)
            r: Radii in [0, R]
            parity: Parity used to extend the profile to [-R, R]

        Returns:
            Interpolated values with the shape of ``r``
        """
        values = np.asarray(values, dtype=float)
        r = np.asarray(r, dtype=float)
        if self.is_spectral:
            half = values[::-1]
            full = np.concatenate([half, parity * half[::-1]])
            return barycentric_interpolate(self._x_full, full, r / self.radius)
        return CubicSpline(self.nodes, values)(r)

    def boundary_row(self, order: int, parity: int) -> np.ndarray:
        """Row of the differentiation matrix at r = R."""
        return self.diff_matrix(order, parity)[-1]


@lru_cache(maxsize=32)
def unit_grid(n: int) -> RadialGrid:
    """Shared Chebyshev grid on [0, 1]; its operator caches are reused across solves."""
    return RadialGrid(n, "chebyshev-lobatto", 1.0)
