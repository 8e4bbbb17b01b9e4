"""
Functions on the unit sphere and Hanzawa map specifications.
"""

from dataclasses import dataclass, field
from typing import Any, Dict, List, Mapping, Optional, Tuple

import numpy as np

from ..errors import ConfigurationError, InvalidSpecError
from ..tools.harmonics import (
    SphereGrid,
    degree_order_pairs,
    flat_index,
    laplace_beltrami_multiplier,
    n_coeffs,
    real_ylm,
    sphere_grid,
)

DEFAULT_DELTA = 0.1
MAX_DELTA = 1.0 / 6.0


@dataclass(frozen=True)
class SphereFunction:
    """
    Band-limited real function on the sphere, sum of c_lm Y_lm for l <= L.
    """

    L: int
    coeffs: np.ndarray

    def __post_init__(self):
        coeffs = np.asarray(self.coeffs, dtype=float)
        if coeffs.shape != (n_coeffs(self.L),):
            raise ConfigurationError(
                f"band limit {self.L} needs {n_coeffs(self.L)} coefficients, "
                f"got {coeffs.shape}"
            )
        object.__setattr__(self, "coeffs", coeffs)

    @classmethod
    def zero(cls, L: int) -> "SphereFunction":
        return cls(L, np.zeros(n_coeffs(L)))

    @classmethod
    def from_modes(
        cls, L: int, modes: Mapping[Tuple[int, int], float]
    ) -> "SphereFunction":
        """Build from {(l, m): c_lm}."""
        coeffs = np.zeros(n_coeffs(L))
        for (l, m), c in modes.items():
            if l > L or abs(m) > l:
                raise ConfigurationError(f"mode ({l}, {m}) outside band limit {L}")
            coeffs[flat_index(l, m)] = c
        return cls(L, coeffs)

    @classmethod
    def from_samples(
        cls, grid: SphereGrid, values: np.ndarray, L: int
    ) -> "SphereFunction":
        return cls(L, grid.analyze(values, L))

    def coefficient(self, l: int, m: int) -> float:
        return float(self.coeffs[flat_index(l, m)])

    def __mul__(self, factor: float) -> "SphereFunction":
        return SphereFunction(self.L, self.coeffs * float(factor))

    __rmul__ = __mul__

    def evaluate(self, theta, phi, dtheta: int = 0, dphi: int = 0) -> np.ndarray:
        """Values (or coordinate derivatives) at arbitrary directions."""
        theta = np.asarray(theta, dtype=float)
        out = np.zeros(np.broadcast(theta, np.asarray(phi)).shape)
        for (l, m), c in zip(degree_order_pairs(self.L), self.coeffs):
            if c != 0.0:
                out = out + c * real_ylm(l, m, theta, phi, dtheta, dphi)
        return out

    def on_grid(self, grid: SphereGrid, dtheta: int = 0, dphi: int = 0) -> np.ndarray:
        return grid.synthesize(self.coeffs, dtheta, dphi)

    def apply_multiplier(self, multiplier) -> "SphereFunction":
        """Scale each degree-l block by multiplier(l)."""
        scale = np.array([multiplier(l) for l, _ in degree_order_pairs(self.L)])
        return SphereFunction(self.L, self.coeffs * scale)

    def laplace_beltrami(self) -> "SphereFunction":
        return self.apply_multiplier(laplace_beltrami_multiplier)

    def sup_norm(self, grid: Optional[SphereGrid] = None) -> float:
        """Max |value| sampled on a grid resolving twice the band limit."""
        grid = grid or sphere_grid(max(2 * self.L, 8))
        return float(np.max(np.abs(self.on_grid(grid))))


def check_delta(delta: float) -> None:
    if not 0.0 < delta < MAX_DELTA:
        raise InvalidSpecError(
            f"cutoff half-width delta must lie in (0, {MAX_DELTA:.6f}), got {delta}"
        )


@dataclass(frozen=True)
class HanzawaMapSpec:
    """
    Boundary perturbation rho and the cutoff half-width delta.

    ``validate`` enforces sup|rho| < delta, the range in which the map is a
    diffeomorphism.
    """

    rho: SphereFunction
    delta: float = DEFAULT_DELTA
    cutoff_name: str = "c2-plateau-a0.2"

    def validate(self) -> "HanzawaMapSpec":
        check_delta(self.delta)
        size = self.rho.sup_norm()
        if size >= self.delta:
            raise InvalidSpecError(
                f"sup|rho| = {size:.6g} must be below delta = {self.delta}",
                details=[{"sup_rho": size, "delta": self.delta}],
            )
        return self


@dataclass(frozen=True)
class SurfaceField:
    """Scalar or vector samples on a sphere grid."""

    grid: SphereGrid
    values: np.ndarray
    meta: Dict[str, Any] = field(default_factory=dict)

    def to_sphere_function(self, L: int) -> SphereFunction:
        if self.values.ndim != 1:
            raise ConfigurationError("only scalar fields expand into harmonics")
        return SphereFunction.from_samples(self.grid, self.values, L)

    def to_rows(self) -> List[Dict[str, float]]:
        return surface_rows(self.grid, self.values)


def surface_rows(grid: SphereGrid, values: np.ndarray) -> List[Dict[str, float]]:
    """(theta, phi, value) records; vector fields give value_x, value_y, value_z."""
    values = np.asarray(values, dtype=float)
    rows = []
    for k in range(grid.size):
        row = {"theta": float(grid.theta[k]), "phi": float(grid.phi[k])}
        if values.ndim == 1:
            row["value"] = float(values[k])
        else:
            for axis, name in enumerate("xyz"):
                row[f"value_{name}"] = float(values[k, axis])
        rows.append(row)
    return rows
