"""
Numerical result containers.

These hold numpy arrays, so they are plain frozen dataclasses rather than
pydantic models; each offers ``to_rows`` / ``sidecar`` helpers that produce
the plain records the formatter writes to CSV and JSON.
"""

from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional

import numpy as np

from ..tools.chebyshev import RadialGrid
from .rates import RateFunction


@dataclass(frozen=True)
class StationaryState:
    """
    Radially symmetric stationary solution on [0, radius].

    ``sigma_prime_1`` is the boundary derivative in the units of ``grid``.
    ``physical_radius`` keeps R_s after rescaling to the unit ball.
    """

    radius: float
    grid: RadialGrid
    sigma: np.ndarray
    sigma_prime_1: float
    v: np.ndarray
    f: RateFunction
    g: RateFunction
    p: Optional[np.ndarray] = None
    gamma: Optional[float] = None
    physical_radius: Optional[float] = None
    residuals: Dict[str, float] = field(default_factory=dict)

    @property
    def rescaled(self) -> bool:
        return self.radius == 1.0 and self.physical_radius is not None

    @property
    def nodes(self) -> np.ndarray:
        return self.grid.nodes

    @property
    def boundary_growth(self) -> float:
        """g evaluated at the boundary value sigma = 1."""
        return float(self.g.values(1.0))

    def to_rows(self) -> List[Dict[str, Any]]:
        p = self.p if self.p is not None else np.full(self.grid.n, np.nan)
        return [
            {"r": float(r), "sigma": float(s), "v": float(v), "p": float(q)}
            for r, s, v, q in zip(self.grid.nodes, self.sigma, self.v, p)
        ]

    def sidecar(self) -> Dict[str, Any]:
        return {
            "R_s": self.physical_radius if self.rescaled else self.radius,
            "sigma_prime_1": self.sigma_prime_1,
            "gamma": self.gamma,
            "n_radial": self.grid.n,
            "rescaled": self.rescaled,
            "residuals": dict(self.residuals),
        }


@dataclass(frozen=True)
class ModalStokesProblem:
    """
    Per-mode Stokes data on the unit ball.

    ``source`` holds the divergence data at the grid nodes; a 2-D array with
    one column per right-hand side is accepted for batched solves.
    """

    l: int
    source: np.ndarray
    body_force_grad_coeff: float = 0.0
    traction_normal: float = 0.0
    traction_tangent: float = 0.0


@dataclass(frozen=True)
class ModalStokesSolution:
    """Radial profiles of the spheroidal velocity and the pressure."""

    l: int
    grid: RadialGrid
    u_r: np.ndarray
    u_t: np.ndarray
    p: np.ndarray
    boundary_normal_velocity: float
    coefficients: Dict[str, float] = field(default_factory=dict)


@dataclass(frozen=True)
class ModalBlockOperator:
    """
    Dense per-mode block operator acting on (phi at interior nodes, c).

    Rows and columns run over the interior radial nodes in ascending order
    (phi(1) = 0 is eliminated), followed by the boundary coefficient c.
    ``state`` is the unit-ball stationary state on the operator's grid.
    """

    l: int
    epsilon: float
    gamma: float
    matrix: np.ndarray
    state: StationaryState
    j_row: np.ndarray
    kernel: np.ndarray
    l_block: np.ndarray
    multiplier: float
    assembly_residual: float = 0.0

    @property
    def grid(self) -> RadialGrid:
        return self.state.grid

    @property
    def sigma_prime_1(self) -> float:
        return self.state.sigma_prime_1


@dataclass(frozen=True)
class EpsilonSpectrumReport:
    """Spectrum of one modal block operator."""

    l: int
    epsilon: float
    gamma: float
    eigenvalues: np.ndarray
    slow_branch: complex
    slow_eigvec_ratio: float
    fast_branch_max: float
    slow_eigenvector: Optional[np.ndarray] = None

    @property
    def slow_is_real(self) -> bool:
        return self.slow_branch.imag == 0.0

    def to_row(self) -> Dict[str, Any]:
        return {
            "l": self.l,
            "epsilon": self.epsilon,
            "gamma": self.gamma,
            "slow_re": float(self.slow_branch.real),
            "slow_im": float(self.slow_branch.imag),
            "fast_max_re": float(self.fast_branch_max),
            "eigvec_ratio": float(self.slow_eigvec_ratio),
        }


@dataclass(frozen=True)
class LinearModalTrajectory:
    """Time history of one modal linear evolution."""

    l: int
    times: np.ndarray
    c_values: np.ndarray
    phi_norms: np.ndarray
    fitted_rate: float
    fit_r2: float

    def to_rows(self) -> List[Dict[str, Any]]:
        return [
            {"t": float(t), "c": float(c), "phi_norm": float(q)}
            for t, c, q in zip(self.times, self.c_values, self.phi_norms)
        ]


@dataclass(frozen=True)
class RadialFrontState:
    """Snapshot of the radially symmetric free-boundary evolution."""

    t: float
    R: float
    sigma: np.ndarray


@dataclass(frozen=True)
class RadialTrajectory:
    """
    Nonlinear radial trajectory.

    ``status`` is ``"completed"`` or ``"blow-up"`` when the radius left the
    configured window.
    """

    states: List[RadialFrontState]
    grid: RadialGrid
    epsilon: float
    status: str
    sigma_center: np.ndarray
    volume_residuals: np.ndarray
    reference_radius: Optional[float] = None

    @property
    def times(self) -> np.ndarray:
        return np.array([s.t for s in self.states])

    @property
    def radii(self) -> np.ndarray:
        return np.array([s.R for s in self.states])

    @property
    def max_volume_residual(self) -> float:
        if self.volume_residuals.size == 0:
            return 0.0
        return float(np.max(np.abs(self.volume_residuals)))

    def running_rate(self) -> np.ndarray:
        """Log-derivative of |R - R_ref|; NaN where undefined."""
        if self.reference_radius is None or len(self.states) < 2:
            return np.full(len(self.states), np.nan)
        gap = np.abs(self.radii - self.reference_radius)
        with np.errstate(divide="ignore", invalid="ignore"):
            rate = np.gradient(np.log(gap), self.times)
        return np.where(np.isfinite(rate), rate, np.nan)

    def to_rows(self) -> List[Dict[str, Any]]:
        rate = self.running_rate()
        return [
            {
                "t": float(s.t),
                "R": float(s.R),
                "sigma_center": float(c),
                "rate_running": float(q),
            }
            for s, c, q in zip(self.states, self.sigma_center, rate)
        ]
