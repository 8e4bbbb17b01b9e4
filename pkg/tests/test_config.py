"""
Tests for configuration module.

Tests environment Settings and validation of JSON run configurations.
"""

import importlib.util
import json
import os
from pathlib import Path
from unittest.mock import patch

import pytest

from tumor_spectra.config import RunConfig, Settings, load_config, parse_config
from tumor_spectra.errors import ConfigurationError


class TestSettingsInitialization:
    """Test cases for Settings initialization from the environment."""

    def test_settings_with_defaults(self):
        """Test Settings with no environment variables."""
        with patch.dict(os.environ, {}, clear=True):
            settings = Settings()

            assert settings.cache_dir.endswith(str(Path(".cache") / "tumor-spectra"))
            assert settings.jobs == 1
            assert settings.log_level == "WARNING"
            assert settings.output_dir == "results"
            assert settings.cache_enabled

    def test_settings_with_environment_variables(self):
        """Test Settings with every variable set."""
        env_vars = {
            "TUMOR_SPECTRA_CACHE_DIR": "/tmp/ts-cache",
            "TUMOR_SPECTRA_JOBS": "4",
            "TUMOR_SPECTRA_LOG_LEVEL": "debug",
            "TUMOR_SPECTRA_OUTPUT_DIR": "out",
        }

        with patch.dict(os.environ, env_vars, clear=True):
            settings = Settings()

            assert settings.cache_dir == "/tmp/ts-cache"
            assert settings.jobs == 4
            assert settings.log_level == "DEBUG"
            assert settings.output_dir == "out"

    def test_empty_cache_dir_disables_cache(self):
        """Test that an empty cache directory turns caching off."""
        with patch.dict(os.environ, {"TUMOR_SPECTRA_CACHE_DIR": ""}, clear=True):
            assert not Settings().cache_enabled

    @pytest.mark.parametrize(
        "env_vars",
        [
            {"TUMOR_SPECTRA_JOBS": "many"},
            {"TUMOR_SPECTRA_JOBS": "0"},
            {"TUMOR_SPECTRA_LOG_LEVEL": "LOUD"},
        ],
    )
    def test_invalid_environment(self, env_vars):
        """Test that malformed variables raise ValueError."""
        with patch.dict(os.environ, env_vars, clear=True):
            with pytest.raises(ValueError):
                Settings()

    def test_import_ignores_malformed_environment(self):
        """Test that loading the module never reads the environment."""
        spec = importlib.util.find_spec("tumor_spectra.config")
        module = importlib.util.module_from_spec(spec)

        with patch.dict(os.environ, {"TUMOR_SPECTRA_JOBS": "many"}, clear=True):
            spec.loader.exec_module(module)

            assert not hasattr(module, "settings")
            with pytest.raises(ValueError, match="TUMOR_SPECTRA_JOBS"):
                module.Settings()


class TestRunConfigValidation:
    """Test cases for load_config."""

    def test_defaults_filled_in(self, reference_config):
        """Test that omitted sections take their defaults."""
        config = load_config({"model": reference_config["model"]})

        assert config.numerics.n_radial == 128
        assert config.numerics.l_max == 64
        assert config.simulate.stepper == "bdf2"
        assert config.eps_spectrum.epsilons == [1e-4, 3e-4, 1e-3, 3e-3, 1e-2]
        assert config.seed == 0

    def test_model_params(self, reference_config):
        """Test that params() carries gamma and epsilon with the fixed scales."""
        params = load_config(reference_config).model.params(sigma_tilde=0.5)

        assert params.gamma == 30.0
        assert params.epsilon == 0.0
        assert (params.sigma_bar, params.nu) == (1.0, 1.0)
        assert params.sigma_tilde == 0.5

    def test_reference_config(self, reference_config):
        """Test that the shared reference configuration validates."""
        config = load_config(reference_config)

        assert config.model.gamma == 30.0
        assert config.model.f.family == "linear"
        assert config.sweep.l_max == 6

    def test_error_paths(self, reference_config):
        """Test that each failure is reported with its dotted path."""
        reference_config["model"]["epsilon"] = -1.0
        reference_config["numerics"]["n_radial"] = 4

        with pytest.raises(ConfigurationError) as exc_info:
            load_config(reference_config)

        paths = {d["path"] for d in exc_info.value.details}
        assert {"model.epsilon", "numerics.n_radial"} <= paths
        assert exc_info.value.exit_code == 2

    def test_unknown_key_rejected(self, reference_config):
        """Test that misspelled keys are errors, not silently ignored."""
        reference_config["numerics"]["lmax"] = 10

        with pytest.raises(ConfigurationError, match="numerics.lmax"):
            load_config(reference_config)

    @pytest.mark.parametrize(
        "section, values",
        [
            ("numerics", {"radius_window": [5.0, 1.0]}),
            ("simulate", {"radius_bounds": [1.2, 3.0]}),
            ("simulate", {"stepper": "euler"}),
            ("eps_spectrum", {"epsilons": [0.0, 1e-3]}),
            ("eps_spectrum", {"modes": [-1]}),
            ("eps_spectrum", {"epsilon_grid": [1.0, 0.1, 10]}),
            ("sweep", {"gamma_factors": [-0.5]}),
        ],
    )
    def test_section_validators(self, reference_config, section, values):
        """Test the cross-field checks of each section."""
        reference_config[section].update(values)

        with pytest.raises(ConfigurationError):
            load_config(reference_config)

    def test_canonical_json_is_stable(self, reference_config):
        """Test that key order does not change the canonical form."""
        reordered = dict(reversed(list(reference_config.items())))

        assert (
            load_config(reference_config).canonical_json()
            == load_config(reordered).canonical_json()
        )


class TestParseConfig:
    """Test cases for reading configuration files."""

    def test_parse_file(self, config_file):
        """Test reading a valid file."""
        assert isinstance(parse_config(config_file), RunConfig)

    def test_missing_file(self, tmp_path):
        """Test that a missing file is a ConfigurationError."""
        with pytest.raises(ConfigurationError, match="cannot read"):
            parse_config(tmp_path / "absent.json")

    def test_malformed_json(self, tmp_path):
        """Test that the error carries line and column."""
        path = tmp_path / "bad.json"
        path.write_text('{"model":\n  {"f": }\n}', encoding="utf-8")

        with pytest.raises(ConfigurationError) as exc_info:
            parse_config(path)
        assert exc_info.value.details[0]["line"] == 2

    def test_non_object_root(self, tmp_path):
        """Test that the root must be a JSON object."""
        path = tmp_path / "list.json"
        path.write_text(json.dumps([1, 2]), encoding="utf-8")

        with pytest.raises(ConfigurationError, match="JSON object"):
            parse_config(path)
