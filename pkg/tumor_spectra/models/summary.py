"""
Spectral summary model.

Holds the explicit eigenvalue data of the linearized free-boundary problem:
the radial rate alpha0, the neutral surface tensions gamma_l, the rates
alpha_l(gamma) at a configured gamma, and the threshold gamma_star.
"""

from typing import Any, Dict, List, Optional

from pydantic import BaseModel, Field, model_validator


class SpectralSummary(BaseModel):
    """
    Truncated spectral data for degrees 0..l_max.

    ``degrees`` lists l = 2..l_max in order and ``gamma_l`` / ``alpha_l`` are
    aligned with it. ``alpha_l`` and ``alpha_star`` are only present when a
    surface tension was supplied.
    """

    alpha0: float = Field(description="Rate of the radial mode l = 0")
    degrees: List[int] = Field(description="Degrees l = 2..l_max")
    gamma_l: List[float] = Field(description="Neutral surface tension per degree")
    gamma: Optional[float] = Field(default=None, description="Configured gamma")
    alpha_l: Optional[List[float]] = Field(
        default=None, description="Rates alpha_l(gamma) aligned with degrees"
    )
    gamma_star: float = Field(description="max of gamma_l")
    l_star: int = Field(description="Degree attaining gamma_star")
    alpha_star: Optional[float] = Field(
        default=None, description="max(alpha0, alpha_l(gamma))"
    )
    l_max: int = Field(description="Truncation degree")
    tail_bound_met: bool = Field(description="Tail criterion on the last 8 degrees")
    sigma_prime_1: float = Field(description="Boundary slope of the stationary profile")
    boundary_growth: float = Field(description="g(1) on the unit ball")
    n_radial: int = Field(description="Radial nodes used for the quadratures")
    warnings: List[str] = Field(default_factory=list)

    @model_validator(mode="after")
    def _check_consistency(self) -> "SpectralSummary":
        if len(self.degrees) != len(self.gamma_l):
            raise ValueError("degrees and gamma_l must have the same length")
        if self.gamma_l and self.gamma_star != max(self.gamma_l):
            raise ValueError("gamma_star must be the maximum of gamma_l")
        if self.alpha_l is not None and len(self.alpha_l) != len(self.degrees):
            raise ValueError("alpha_l must be aligned with degrees")
        return self

    @property
    def status(self) -> str:
        return "ok" if self.tail_bound_met and not self.warnings else "warning"

    def gamma_of(self, l: int) -> float:
        return self.gamma_l[self.degrees.index(l)]

    def multiplier(self, l: int) -> Optional[float]:
        """Fourier multiplier of the boundary operator at degree l."""
        if l == 0:
            return self.alpha0
        if l == 1:
            return 0.0
        if self.alpha_l is None:
            return None
        return self.alpha_l[self.degrees.index(l)]

    def multiplier_table(self) -> Dict[int, Optional[float]]:
        return {l: self.multiplier(l) for l in range(self.l_max + 1)}

    def to_rows(self) -> List[Dict[str, Any]]:
        """Per-degree records (l, gamma_l, alpha_l, multiplier)."""
        rows = []
        for l in range(self.l_max + 1):
            gl = self.gamma_of(l) if l >= 2 else None
            al = self.multiplier(l) if l >= 2 else None
            rows.append(
                {"l": l, "gamma_l": gl, "alpha_l": al, "multiplier": self.multiplier(l)}
            )
        return rows

    def summary_json(self, epsilon0: Optional[float] = None) -> Dict[str, Any]:
        return {
            "gamma_star": self.gamma_star,
            "l_star": self.l_star,
            "alpha0": self.alpha0,
            "alpha_star": self.alpha_star,
            "epsilon0": epsilon0,
            "tail_bound_met": self.tail_bound_met,
        }


class EpsilonThreshold(BaseModel):
    """
    Spectral estimate of the largest admissible epsilon at a given gamma.

    ``epsilon0`` is the largest tested epsilon at which every eigenvalue of
    the modal operators l = 0..l_max (the degree-1 zero excluded) has real
    part at most ``bound``; ``epsilon_fail`` is the next tested value, where
    the bound fails, or None when the whole grid passed.
    """

    gamma: float
    gamma_star: float
    alpha_star: float = Field(description="max(alpha0, alpha_l(gamma))")
    bound: float = Field(description="alpha_star / 2")
    epsilon0: Optional[float] = Field(description="Spectral threshold estimate")
    epsilon_fail: Optional[float] = None
    l_max: int
    grid: List[float] = Field(description="Scanned epsilon grid")
    bisection_steps: int
    saturated: bool = Field(description="The bound held on the whole grid")
    max_real_part: Optional[float] = Field(
        default=None, description="Max nonzero real part at epsilon0"
    )
    kind: str = Field(default="spectral")
