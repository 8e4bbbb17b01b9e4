"""
Configuration module for tumor-spectra

Two layers: process settings read from the environment (optionally seeded
from a .env file by the CLI), and the validated run configuration read from
a JSON file.
"""

import json
import os
from pathlib import Path
from typing import List, Literal, Optional, Tuple, Union

from pydantic import BaseModel, ConfigDict, Field, ValidationError, model_validator

from .errors import ConfigurationError
from .models.rates import ModelParams, RateFunctionSpec


def _env_int(name: str, default: int) -> int:
    raw = os.getenv(name)
    if raw is None or raw.strip() == "":
        return default
    try:
        return int(raw)
    except ValueError:
        raise ValueError(f"{name} must be an integer, got {raw!r}")


class Settings:
    """Process-level settings for tumor-spectra."""

    def __init__(self):
        default_cache = str(Path.home() / ".cache" / "tumor-spectra")
        # empty string disables the stationary-state cache
        self.cache_dir = os.getenv("TUMOR_SPECTRA_CACHE_DIR", default_cache)
        self.jobs = _env_int("TUMOR_SPECTRA_JOBS", 1)
        self.log_level = os.getenv("TUMOR_SPECTRA_LOG_LEVEL", "WARNING").upper()
        self.output_dir = os.getenv("TUMOR_SPECTRA_OUTPUT_DIR", "results")

        if self.jobs < 1:
            raise ValueError(f"TUMOR_SPECTRA_JOBS must be at least 1, got {self.jobs}")
        if self.log_level not in ("DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL"):
            raise ValueError(f"unknown TUMOR_SPECTRA_LOG_LEVEL {self.log_level!r}")

    @property
    def cache_enabled(self) -> bool:
        return bool(self.cache_dir)


class _Strict(BaseModel):
    model_config = ConfigDict(extra="forbid")


class ModelConfig(_Strict):
    """Rate laws and global parameters (unit-ball units)."""

    f: RateFunctionSpec = Field(description="Nutrient consumption rate")
    g: RateFunctionSpec = Field(description="Proliferation rate")
    epsilon: float = Field(default=0.0, ge=0.0, description="Time-scale ratio")
    gamma: Optional[float] = Field(default=None, gt=0.0, description="Surface tension")
    sigma_max: float = Field(default=2.0, ge=2.0, description="Rate domain upper end")

    def params(self, sigma_tilde: Optional[float] = None) -> ModelParams:
        """Global parameters with the fixed normalization sigma_bar = nu = 1."""
        return ModelParams(
            epsilon=self.epsilon, gamma=self.gamma, sigma_tilde=sigma_tilde
        )


class Tolerances(_Strict):
    newton: float = Field(default=1e-13, gt=0.0)
    residual: float = Field(default=1e-8, gt=0.0)
    root: float = Field(default=1e-14, gt=0.0)
    quadrature: float = Field(default=1e-12, gt=0.0)
    compatibility: float = Field(default=1e-9, gt=0.0)


class NumericsConfig(_Strict):
    n_radial: int = Field(default=128, ge=16, description="Stationary-state nodes")
    n_modal: int = Field(
        default=96, ge=16, description="Interior nodes per modal operator"
    )
    L: int = Field(default=16, ge=1, description="Spherical-harmonic band limit")
    l_max: int = Field(default=64, ge=2, description="Spectral truncation degree")
    radius_window: Tuple[float, float] = Field(default=(1e-3, 50.0))
    radius_scan_points: int = Field(default=200, ge=3)
    max_newton_iterations: int = Field(default=50, ge=1)
    tolerances: Tolerances = Field(default_factory=Tolerances)

    @model_validator(mode="after")
    def _check_window(self) -> "NumericsConfig":
        lo, hi = self.radius_window
        if not 0.0 < lo < hi:
            raise ValueError("radius_window must satisfy 0 < R_min < R_max")
        return self


class SimulateConfig(_Strict):
    mode: int = Field(default=0, ge=0, description="Degree of the linear modal run")
    horizon: float = Field(default=5.0, gt=0.0)
    dt: float = Field(default=0.01, gt=0.0)
    perturbation: float = Field(default=1e-2, gt=0.0, description="Relative amplitude")
    stepper: Literal["bdf2", "rk4"] = "bdf2"
    nonlinear: bool = True
    n_radial: int = Field(default=48, ge=16)
    radius_bounds: Tuple[float, float] = Field(
        default=(0.2, 5.0), description="Blow-up window as multiples of R_s"
    )
    skip_fraction: float = Field(default=0.2, ge=0.0, lt=1.0)

    @model_validator(mode="after")
    def _check_bounds(self) -> "SimulateConfig":
        lo, hi = self.radius_bounds
        if not 0.0 < lo < 1.0 < hi:
            raise ValueError("radius_bounds must satisfy 0 < low < 1 < high")
        return self


class EpsSpectrumConfig(_Strict):
    modes: List[int] = Field(default_factory=lambda: [0, 1, 2], min_length=1)
    epsilons: List[float] = Field(
        default_factory=lambda: [1e-4, 3e-4, 1e-3, 3e-3, 1e-2], min_length=1
    )
    threshold: bool = Field(default=False, description="Also estimate epsilon0")
    threshold_l_max: int = Field(default=16, ge=2)
    epsilon_grid: Tuple[float, float, int] = Field(default=(1e-6, 1.0, 40))
    bisection_steps: int = Field(default=20, ge=0)

    @model_validator(mode="after")
    def _check_values(self) -> "EpsSpectrumConfig":
        if any(l < 0 for l in self.modes):
            raise ValueError("modes must be nonnegative degrees")
        if any(e <= 0.0 for e in self.epsilons):
            raise ValueError("epsilons must be positive")
        lo, hi, points = self.epsilon_grid
        if not 0.0 < lo < hi or points < 2:
            raise ValueError("epsilon_grid must be (min > 0, max > min, points >= 2)")
        return self


class SweepConfig(_Strict):
    gamma_factors: List[float] = Field(default_factory=lambda: [0.8, 1.2], min_length=1)
    epsilons: List[float] = Field(default_factory=lambda: [1e-3, 1e-2], min_length=1)
    l_max: int = Field(default=16, ge=2)

    @model_validator(mode="after")
    def _check_values(self) -> "SweepConfig":
        if any(x <= 0.0 for x in self.gamma_factors + self.epsilons):
            raise ValueError("gamma_factors and epsilons must be positive")
        return self


class RunConfig(_Strict):
    """Complete, validated run configuration."""

    model: ModelConfig
    numerics: NumericsConfig = Field(default_factory=NumericsConfig)
    simulate: SimulateConfig = Field(default_factory=SimulateConfig)
    eps_spectrum: EpsSpectrumConfig = Field(default_factory=EpsSpectrumConfig)
    sweep: SweepConfig = Field(default_factory=SweepConfig)
    seed: int = 0

    def canonical_json(self) -> str:
        """Sorted, whitespace-free JSON of the full configuration."""
        return json.dumps(
            self.model_dump(mode="json"), sort_keys=True, separators=(",", ":")
        )


def _error_details(exc: ValidationError) -> List[dict]:
    return [
        {
            "path": ".".join(str(p) for p in err["loc"]),
            "message": err["msg"],
            "type": err["type"],
        }
        for err in exc.errors()
    ]


def load_config(data: dict) -> RunConfig:
    """
    Validate an already-parsed configuration mapping.

    Raises:
        ConfigurationError: With one detail entry per failure
    """
    try:
        return RunConfig.model_validate(data)
    except ValidationError as exc:
        details = _error_details(exc)
        paths = ", ".join(d["path"] or "<root>" for d in details)
        raise ConfigurationError(f"invalid configuration ({paths})", details) from exc


def parse_config(path: Union[str, Path]) -> RunConfig:
    """
    Read and validate a JSON run configuration.

    Args:
        path: Configuration file

    Returns:
        RunConfig with defaults filled in

    Raises:
        ConfigurationError: Missing file, malformed JSON, or validation errors
    """
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigurationError(
            f"cannot read configuration {path}: {exc}", [{"path": str(path)}]
        ) from exc
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigurationError(
            f"configuration {path} is not valid JSON: {exc.msg}",
            [{"line": exc.lineno, "column": exc.colno}],
        ) from exc
    if not isinstance(data, dict):
        raise ConfigurationError("configuration root must be a JSON object")
    return load_config(data)
