"""Data models: rate laws, radial profiles, spectral summaries and sphere functions."""

from .profiles import (
    EpsilonSpectrumReport,
    LinearModalTrajectory,
    ModalBlockOperator,
    ModalStokesProblem,
    ModalStokesSolution,
    RadialFrontState,
    RadialTrajectory,
    StationaryState,
)
from .rates import (
    AssumptionReport,
    ModelParams,
    RateFunction,
    RateFunctionSpec,
    RescaledUnits,
    eval_rate,
    eval_rate_derivative,
    make_rate_function,
    rescaled_parameters,
    validate_assumptions,
)
from .summary import EpsilonThreshold, SpectralSummary
from .surfaces import HanzawaMapSpec, SphereFunction, SurfaceField, surface_rows

__all__ = [
    "AssumptionReport",
    "EpsilonSpectrumReport",
    "EpsilonThreshold",
    "HanzawaMapSpec",
    "LinearModalTrajectory",
    "ModalBlockOperator",
    "ModalStokesProblem",
    "ModalStokesSolution",
    "ModelParams",
    "RadialFrontState",
    "RadialTrajectory",
    "RateFunction",
    "RateFunctionSpec",
    "RescaledUnits",
    "SpectralSummary",
    "SphereFunction",
    "StationaryState",
    "SurfaceField",
    "eval_rate",
    "eval_rate_derivative",
    "make_rate_function",
    "rescaled_parameters",
    "surface_rows",
    "validate_assumptions",
]
