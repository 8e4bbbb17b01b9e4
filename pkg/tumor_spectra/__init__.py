"""
tumor-spectra - linear stability of radially symmetric tumors

Numerical library and CLI for the free-boundary tumor-growth model with a
Stokes-flow tissue: stationary states, modal spectra and the surface-tension
threshold, epsilon-dependent block spectra, time-domain checks and the
perturbed-sphere geometry behind the linearization.
"""

__version__ = "0.1.0"
__author__ = "tumor-spectra developers"

from .analysis.epsilon_spectrum import (
    assemble_modal_operator,
    epsilon_spectrum,
    epsilon_threshold,
    modal_eigenvalues,
)
from .analysis.simulate import evolve_linear_mode, simulate_radial_nonlinear
from .analysis.spectrum import (
    alpha0,
    alpha_l_of_gamma,
    gamma_l,
    solve_Fl,
    spectral_summary,
)
from .analysis.stationary import find_stationary_radius, rescale_to_unit
from .analysis.stokes import bgamma_via_stokes, modal_J, solve_modal_stokes
from .config import RunConfig, parse_config
from .errors import TumorSpectraError
from .models.rates import (
    RateFunction,
    RateFunctionSpec,
    make_rate_function,
    validate_assumptions,
)
from .stability_analyzer import StabilityAnalyzer

__all__ = [
    "RateFunction",
    "RateFunctionSpec",
    "make_rate_function",
    "validate_assumptions",
    "find_stationary_radius",
    "rescale_to_unit",
    "solve_Fl",
    "alpha0",
    "gamma_l",
    "alpha_l_of_gamma",
    "spectral_summary",
    "solve_modal_stokes",
    "modal_J",
    "bgamma_via_stokes",
    "assemble_modal_operator",
    "modal_eigenvalues",
    "epsilon_spectrum",
    "epsilon_threshold",
    "evolve_linear_mode",
    "simulate_radial_nonlinear",
    "RunConfig",
    "parse_config",
    "StabilityAnalyzer",
    "TumorSpectraError",
]
