"""
Rate laws and model parameters.

A rate law is either the nutrient consumption rate f(sigma) or the
proliferation rate g(sigma). Both are built from a small declarative
specification (the same one that appears in run configuration files) and
can be evaluated together with their first derivative.
"""

import logging
from dataclasses import dataclass, field
from typing import List, Literal, Optional

import numpy as np
from numpy.polynomial import polynomial as P
from pydantic import BaseModel, ConfigDict, Field
from scipy.interpolate import CubicSpline
from scipy.optimize import root_scalar

from ..errors import AssumptionError, ConfigurationError, RateDomainError

logger = logging.getLogger(__name__)

RateFamily = Literal["linear", "polynomial", "tabulated-spline"]

#: Exterior nutrient level and viscosity are fixed by normalization.
SIGMA_BAR = 1.0
NU = 1.0

ASSUMPTION_SAMPLES = 1000


class RateFunctionSpec(BaseModel):
    """
    Declarative description of a rate law.

    Families:
        linear: ``coeffs = [slope]`` gives ``slope * sigma``;
            ``coeffs = [slope, zero]`` gives ``slope * (sigma - zero)``
        polynomial: ascending power coefficients ``c0 + c1 sigma + ...``
        tabulated-spline: cubic spline through ``(knots[i], coeffs[i])``
    """

    model_config = ConfigDict(extra="forbid", frozen=True)

    family: RateFamily = Field(description="Rate law family")
    coeffs: List[float] = Field(
        min_length=1, description="Coefficients (or tabulated values for splines)"
    )
    knots: Optional[List[float]] = Field(
        default=None, description="Spline abscissae, strictly increasing"
    )


@dataclass(frozen=True)
class RateFunction:
    """
    Evaluable rate law with its derivative.

    Instances are immutable; ``scaled`` returns a new law multiplied by a
    constant factor, which is how the unit-ball rescaling is carried out.
    """

    spec: RateFunctionSpec
    sigma_max: float = 2.0
    scale: float = 1.0
    _poly: Optional[np.ndarray] = field(default=None, repr=False, compare=False)
    _spline: Optional[CubicSpline] = field(default=None, repr=False, compare=False)

    @property
    def family(self) -> str:
        return self.spec.family

    def values(self, sigma):
        """Evaluate without the domain check (used inside solvers)."""
        sigma = np.asarray(sigma, dtype=float)
        if self._spline is not None:
            return self.scale * self._spline(sigma)
        return self.scale * P.polyval(sigma, self._poly)

    def derivative(self, sigma):
        """Evaluate the first derivative without the domain check."""
        sigma = np.asarray(sigma, dtype=float)
        if self._spline is not None:
            return self.scale * self._spline(sigma, 1)
        return self.scale * P.polyval(sigma, P.polyder(self._poly))

    def __call__(self, sigma):
        return eval_rate(self, sigma)

    def scaled(self, factor: float) -> "RateFunction":
        """
        Return the same law multiplied by ``factor``.

        Args:
            factor: Positive multiplier (R_s**2 when rescaling to the unit ball)

        Returns:
            New RateFunction sharing the underlying representation
        """
        return RateFunction(
            spec=self.spec,
            sigma_max=self.sigma_max,
            scale=self.scale * float(factor),
            _poly=self._poly,
            _spline=self._spline,
        )

    def to_dict(self) -> dict:
        data = self.spec.model_dump(exclude_none=True)
        data["scale"] = self.scale
        return data


def make_rate_function(spec: RateFunctionSpec, sigma_max: float = 2.0) -> RateFunction:
    """
    Build an evaluable rate law from its specification.

    Args:
        spec: Family and coefficients
        sigma_max: Upper end of the evaluation domain [0, sigma_max]

    Returns:
        RateFunction with derivative support

    Raises:
        ConfigurationError: If the coefficients or the spline table are malformed
    """
    if not spec.coeffs:
        raise ConfigurationError("rate function needs at least one coefficient")
    if sigma_max < 2.0 * SIGMA_BAR:
        raise ConfigurationError(
            f"sigma_max must be at least {2.0 * SIGMA_BAR}, got {sigma_max}"
        )

    if spec.family == "linear":
        if len(spec.coeffs) > 2:
            raise ConfigurationError(
                "linear rate takes [slope] or [slope, zero], "
                f"got {len(spec.coeffs)} coefficients"
            )
        slope = spec.coeffs[0]
        zero = spec.coeffs[1] if len(spec.coeffs) == 2 else 0.0
        poly = np.array([-slope * zero, slope], dtype=float)
        return RateFunction(spec=spec, sigma_max=sigma_max, _poly=poly)

    if spec.family == "polynomial":
        poly = np.array(spec.coeffs, dtype=float)
        return RateFunction(spec=spec, sigma_max=sigma_max, _poly=poly)

    knots = np.asarray(spec.knots if spec.knots is not None else [], dtype=float)
    values = np.asarray(spec.coeffs, dtype=float)
    if knots.size != values.size:
        raise ConfigurationError(
            f"spline table needs one knot per value ({knots.size} knots, "
            f"{values.size} values)"
        )
    if knots.size < 4:
        raise ConfigurationError("spline table needs at least 4 points")
    if np.any(np.diff(knots) <= 0.0):
        raise ConfigurationError("spline knots must be strictly increasing")
    if knots[0] > 0.0 or knots[-1] < sigma_max:
        raise ConfigurationError(
            f"spline table must cover [0, {sigma_max}], "
            f"got [{knots[0]}, {knots[-1]}]"
        )
    return RateFunction(
        spec=spec, sigma_max=sigma_max, _spline=CubicSpline(knots, values)
    )


def _check_domain(r: RateFunction, sigma) -> np.ndarray:
    sigma = np.asarray(sigma, dtype=float)
    if not np.all(np.isfinite(sigma)):
        raise RateDomainError("rate evaluated at a non-finite concentration")
    if np.any(sigma < 0.0) or np.any(sigma > r.sigma_max):
        bad = sigma[(sigma < 0.0) | (sigma > r.sigma_max)].ravel()[0]
        raise RateDomainError(
            f"concentration {bad} outside the rate domain [0, {r.sigma_max}]"
        )
    return sigma


def eval_rate(r: RateFunction, sigma):
    """
    Evaluate a rate law on [0, sigma_max].

    Raises:
        RateDomainError: If any concentration lies outside the domain
    """
    sigma = _check_domain(r, sigma)
    out = r.values(sigma)
    return float(out) if out.ndim == 0 else out


def eval_rate_derivative(r: RateFunction, sigma):
    """Evaluate the derivative of a rate law on [0, sigma_max]."""
    sigma = _check_domain(r, sigma)
    out = r.derivative(sigma)
    return float(out) if out.ndim == 0 else out


class AssumptionReport(BaseModel):
    """Outcome of the standing-assumption checks on a pair of rate laws."""

    consumption_ok: bool = Field(description="f(0)=0 and f' > 0 on [0, sigma_max]")
    proliferation_ok: bool = Field(description="g' > 0 and g has a positive zero")
    threshold_ok: bool = Field(description="the zero of g lies below sigma_bar")
    sigma_tilde: Optional[float] = Field(
        default=None, description="Zero of g, when one was found"
    )
    messages: List[str] = Field(default_factory=list)

    @property
    def passed(self) -> bool:
        return self.consumption_ok and self.proliferation_ok and self.threshold_ok

    def raise_for_failure(self) -> None:
        """Raise AssumptionError when any assumption failed."""
        if not self.passed:
            raise AssumptionError(
                "rate laws violate the standing assumptions: "
                + "; ".join(self.messages),
                report=self,
            )


def validate_assumptions(
    f: RateFunction,
    g: RateFunction,
    sigma_bar: float = SIGMA_BAR,
    root_tolerance: float = 1e-12,
) -> AssumptionReport:
    """
    Check the standing assumptions on f and g by dense sampling.

    Args:
        f: Consumption rate
        g: Proliferation rate
        sigma_bar: Exterior nutrient level
        root_tolerance: Required |g(sigma_tilde)|

    Returns:
        AssumptionReport; failures are report entries, never exceptions
    """
    sigma_max = min(f.sigma_max, g.sigma_max)
    samples = np.linspace(0.0, sigma_max, ASSUMPTION_SAMPLES)
    messages: List[str] = []

    f0 = float(f.values(0.0))
    exact_zero = f.family in ("linear", "polynomial")
    f0_ok = f0 == 0.0 if exact_zero else abs(f0) <= 1e-12
    fprime_ok = bool(np.all(f.derivative(samples) > 0.0))
    consumption = f0_ok and fprime_ok
    if not f0_ok:
        messages.append(f"consumption: f(0) = {f0!r} is not zero")
    if not fprime_ok:
        messages.append("consumption: f' is not positive on the sample grid")

    gprime_ok = bool(np.all(g.derivative(samples) > 0.0))
    if not gprime_ok:
        messages.append("proliferation: g' is not positive on the sample grid")

    sigma_tilde = None
    g_lo, g_hi = float(g.values(0.0)), float(g.values(sigma_max))
    if g_lo < 0.0 < g_hi:
        sol = root_scalar(
            lambda s: float(g.values(s)),
            bracket=(0.0, sigma_max),
            method="brentq",
            xtol=1e-15,
            rtol=4 * np.finfo(float).eps,
        )
        sigma_tilde = float(sol.root)
        residual = abs(float(g.values(sigma_tilde)))
        if residual > root_tolerance:
            messages.append(
                f"proliferation: |g(sigma_tilde)| = {residual:.3e} above tolerance"
            )
            gprime_ok = False
    else:
        messages.append(f"proliferation: g has no sign change on (0, {sigma_max}]")
    proliferation = gprime_ok and sigma_tilde is not None and sigma_tilde > 0.0

    below_bar = sigma_tilde is not None and sigma_tilde < sigma_bar
    if sigma_tilde is not None and not below_bar:
        messages.append(
            f"threshold: sigma_tilde = {sigma_tilde!r} "
            f"is not below sigma_bar = {sigma_bar}"
        )

    report = AssumptionReport(
        consumption_ok=consumption,
        proliferation_ok=proliferation,
        threshold_ok=below_bar,
        sigma_tilde=sigma_tilde,
        messages=messages,
    )
    logger.debug("assumption report: %s", report.model_dump())
    return report


class ModelParams(BaseModel):
    """Global model parameters in unit-ball units."""

    model_config = ConfigDict(extra="forbid", frozen=True)

    epsilon: float = Field(default=0.0, ge=0.0, description="Time-scale ratio")
    gamma: Optional[float] = Field(
        default=None, gt=0.0, description="Surface tension coefficient"
    )
    sigma_bar: Literal[1.0] = Field(default=SIGMA_BAR)
    nu: Literal[1.0] = Field(default=NU)
    sigma_tilde: Optional[float] = Field(default=None, description="Zero of g")


class RescaledUnits(BaseModel):
    """Conversion factors between physical and unit-ball quantities."""

    radius: float = Field(description="Stationary radius R_s")
    gamma: Optional[float] = Field(default=None, description="Unit-ball gamma")
    epsilon: float = Field(default=0.0)
    rate_factor: float = Field(description="f, g and eigenvalues scale by R_s**2")
    time_factor: float = Field(description="Unit-ball time per physical time")
    velocity_factor: float = Field(description="Unit-ball velocity per physical")
    pressure_factor: float = Field(description="Unit-ball pressure per physical")


def rescaled_parameters(
    radius: float, gamma: Optional[float] = None, epsilon: float = 0.0
) -> RescaledUnits:
    """
    Convert physical parameters to the unit-ball normalization R_s = 1.

    Args:
        radius: Stationary radius in physical length units
        gamma: Physical surface tension, if any
        epsilon: Time-scale ratio (unchanged by the rescaling)

    Returns:
        RescaledUnits with the converted gamma and the scaling factors
    """
    if radius <= 0.0:
        raise ConfigurationError(f"radius must be positive, got {radius}")
    r2 = radius * radius
    return RescaledUnits(
        radius=radius,
        gamma=None if gamma is None else gamma * radius,
        epsilon=epsilon,
        rate_factor=r2,
        time_factor=1.0 / r2,
        velocity_factor=radius,
        pressure_factor=r2,
    )
