"""
Shared pytest fixtures and configuration for tumor-spectra tests.

The reference model (f = sigma, g = sigma - 1/2) has closed-form oracles in
fixtures/reference_models.py; its stationary state is solved once per session.
"""

import json
from typing import Any, Dict

import pytest

from tumor_spectra.analysis.epsilon_spectrum import clear_caches
from tumor_spectra.analysis.spectrum import spectral_summary
from tumor_spectra.analysis.stationary import find_stationary_radius, rescale_to_unit
from tumor_spectra.models.rates import RateFunctionSpec, make_rate_function

from tests.fixtures.reference_models import LINEAR_F, LINEAR_G


@pytest.fixture(scope="session")
def linear_rates():
    """Rate laws of the reference model as (f, g)."""
    f = make_rate_function(RateFunctionSpec(**LINEAR_F))
    g = make_rate_function(RateFunctionSpec(**LINEAR_G))
    return f, g


@pytest.fixture(scope="session")
def physical_state(linear_rates):
    """Unscaled stationary state of the reference model on 128 nodes."""
    f, g = linear_rates
    return find_stationary_radius(f, g, n=128)


@pytest.fixture(scope="session")
def unit_state(physical_state):
    """Reference stationary state rescaled to the unit ball."""
    return rescale_to_unit(physical_state)


@pytest.fixture(scope="session")
def reference_summary(unit_state):
    """Spectral summary of the reference model up to l = 32."""
    return spectral_summary(unit_state, l_max=32)


@pytest.fixture(scope="session")
def stable_gamma(reference_summary):
    """A surface tension 20% above the threshold."""
    return 1.2 * reference_summary.gamma_star


@pytest.fixture(autouse=True, scope="module")
def _fresh_modal_caches():
    """Modal states are cached per process; start each module clean."""
    clear_caches()
    yield


@pytest.fixture
def reference_config() -> Dict[str, Any]:
    """Small but complete run configuration for the reference model."""
    return {
        "model": {"f": dict(LINEAR_F), "g": dict(LINEAR_G), "gamma": 30.0},
        "numerics": {"n_radial": 64, "n_modal": 40, "l_max": 16},
        "simulate": {"horizon": 1.0, "dt": 0.05, "n_radial": 24},
        "eps_spectrum": {
            "modes": [0, 1, 2],
            "epsilons": [1e-3, 1e-2],
            "threshold": False,
            "threshold_l_max": 8,
        },
        "sweep": {"gamma_factors": [0.8, 1.2], "epsilons": [1e-2], "l_max": 6},
        "seed": 7,
    }


@pytest.fixture
def config_file(tmp_path, reference_config):
    """The reference configuration written to a JSON file."""
    path = tmp_path / "linear.json"
    path.write_text(json.dumps(reference_config), encoding="utf-8")
    return path


@pytest.fixture
def clean_env(tmp_path):
    """Environment for CLI runs: cache under tmp_path, default log level."""
    return {
        "TUMOR_SPECTRA_CACHE_DIR": str(tmp_path / "cache"),
        "TUMOR_SPECTRA_OUTPUT_DIR": str(tmp_path / "results"),
    }
