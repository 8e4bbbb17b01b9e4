"""
Command orchestration for tumor-spectra.

StabilityAnalyzer turns a validated RunConfig into the tables, JSON documents
and per-stage residuals of one command. Writing them to disk is left to
``formatter.ResultWriter``.
"""

import logging
from concurrent.futures import ThreadPoolExecutor
from typing import Any, Callable, Dict, List, Optional, Tuple

import numpy as np

from .analysis.epsilon_spectrum import (
    assemble_modal_operator,
    clear_caches,
    epsilon_spectrum,
    epsilon_threshold,
    fit_slow_branch,
    max_nonzero_real_part,
    slow_branch_table,
)
from .analysis.simulate import (
    evolve_linear_mode,
    fit_radial_rate,
    simulate_radial_nonlinear,
)
from .analysis.spectrum import alpha0_for_state, spectral_summary, stability_verdict
from .analysis.stationary import find_stationary_radius, rescale_to_unit
from .analysis.stokes import oracle_report
from .config import RunConfig
from .errors import ConfigurationError, TumorSpectraError
from .models.profiles import StationaryState
from .models.rates import make_rate_function, rescaled_parameters, validate_assumptions
from .models.summary import SpectralSummary
from .tools.cache import StateCache, state_key

logger = logging.getLogger(__name__)

COMMANDS = ("stationary", "spectrum", "threshold", "eps-spectrum", "simulate", "sweep")

#: Degrees and gamma factors of the Stokes oracle table written by `threshold`.
ORACLE_MAX_DEGREE = 12
ORACLE_GAMMA_FACTORS = (0.8, 1.0, 1.2)

STATIONARY_COLUMNS = ["r", "sigma", "v", "p"]
SPECTRUM_COLUMNS = ["l", "gamma_l", "alpha_l", "multiplier"]
ORACLE_COLUMNS = ["l", "gamma", "multiplier_formula", "multiplier_stokes", "rel_err"]
EPS_COLUMNS = [
    "l",
    "epsilon",
    "gamma",
    "slow_re",
    "slow_im",
    "fast_max_re",
    "eigvec_ratio",
]
FIT_COLUMNS = ["l", "gamma", "limit", "slope", "intercept", "r2", "max_scaled_gap"]
LINEAR_COLUMNS = ["t", "c", "phi_norm"]
RADIAL_COLUMNS = ["t", "R", "sigma_center", "rate_running"]
SWEEP_COLUMNS = ["gamma", "epsilon", "max_nonzero_re", "stable", "l_arg", "status"]


def error_block(exc: BaseException) -> Dict[str, Any]:
    """Machine-readable description of any exception."""
    if isinstance(exc, TumorSpectraError):
        return exc.to_dict()
    return {"type": type(exc).__name__, "message": str(exc), "details": []}


def new_results(command: str) -> Dict[str, Any]:
    return {
        "command": command,
        "success": True,
        "errors": [],
        "warnings": [],
        "tables": {},
        "documents": {},
        "residuals": {},
        "summary": {},
    }


class StabilityAnalyzer:
    """
    Runs one command against a stationary state computed (or loaded) once.

    Stages that every command needs (stationary state, spectral summary)
    always raise on failure. Optional stages (oracle table, epsilon
    threshold, slow-branch fits, sweep cells) record their failure in
    ``results["errors"]`` when ``continue_on_error`` is set.
    """

    def __init__(
        self,
        config: RunConfig,
        cache: Optional[StateCache] = None,
        jobs: int = 1,
        continue_on_error: bool = False,
        verbose: bool = False,
        quiet: bool = False,
    ):
        """
        Initialize the analyzer.

        Args:
            config: Validated run configuration
            cache: Stationary-state cache (disabled when None)
            jobs: Worker threads for per-degree work and sweep cells
            continue_on_error: Keep going when an optional stage fails
            verbose: Print what each stage is doing
            quiet: Suppress progress lines
        """
        if jobs < 1:
            raise ConfigurationError(f"jobs must be at least 1, got {jobs}")
        self.config = config
        self.cache = cache or StateCache(None)
        self.jobs = jobs
        self.continue_on_error = continue_on_error
        self.verbose = verbose and not quiet
        self.quiet = quiet

        model = config.model
        self.f = make_rate_function(model.f, model.sigma_max)
        self.g = make_rate_function(model.g, model.sigma_max)
        self._physical: Optional[StationaryState] = None
        self._unit: Optional[StationaryState] = None
        self._summaries: Dict[Tuple[int, Optional[float]], SpectralSummary] = {}

    def _progress(self, message: str):
        if not self.quiet:
            print(message)

    def _verbose_print(self, message: str):
        """Print verbose messages when verbose mode is enabled."""
        if self.verbose:
            print(f"   💭 {message}")

    def run(self, command: str) -> Dict[str, Any]:
        """
        Execute a command.

        Args:
            command: One of COMMANDS

        Returns:
            Results dictionary (tables, documents, residuals, summary)
        """
        handlers: Dict[str, Callable[[Dict[str, Any]], None]] = {
            "stationary": self._run_stationary,
            "spectrum": self._run_spectrum,
            "threshold": self._run_threshold,
            "eps-spectrum": self._run_eps_spectrum,
            "simulate": self._run_simulate,
            "sweep": self._run_sweep,
        }
        if command not in handlers:
            raise ConfigurationError(
                f"unknown command {command!r}; expected one of {', '.join(COMMANDS)}"
            )
        results = new_results(command)
        logger.info("running command %s", command)
        try:
            handlers[command](results)
        finally:
            # modal states and j_l rows are only reused within one command
            clear_caches()
        results["success"] = not results["errors"]
        return results

    def _optional(self, stage: str, results: Dict[str, Any], action: Callable[[], Any]):
        """Run an optional stage, recording its failure instead of raising."""
        try:
            return action()
        except TumorSpectraError as e:
            results["errors"].append({"stage": stage, **e.to_dict()})
            if not self.continue_on_error:
                raise
            logger.warning("stage %s failed: %s", stage, e.message)
            return None

    # ------------------------------------------------------------------
    # shared stages

    def stationary_state(self) -> StationaryState:
        """Unscaled stationary state, from the cache when possible."""
        if self._physical is None:
            numerics = self.config.numerics
            key = state_key(
                self.f,
                self.g,
                {
                    "n_radial": numerics.n_radial,
                    "radius_window": list(numerics.radius_window),
                    "radius_scan_points": numerics.radius_scan_points,
                    "root_tol": numerics.tolerances.root,
                    "max_newton_iterations": numerics.max_newton_iterations,
                },
            )
            self._physical = self.cache.get_or_compute(
                key,
                lambda: find_stationary_radius(
                    self.f,
                    self.g,
                    n=numerics.n_radial,
                    window=tuple(numerics.radius_window),
                    scan_points=numerics.radius_scan_points,
                    root_tol=numerics.tolerances.root,
                    max_iterations=numerics.max_newton_iterations,
                ),
            )
        return self._physical

    def unit_state(self) -> StationaryState:
        """Stationary state rescaled to the unit ball, with the configured gamma."""
        if self._unit is None:
            self._unit = rescale_to_unit(
                self.stationary_state(), self.config.model.gamma
            )
        return self._unit

    def summary(
        self, l_max: Optional[int] = None, gamma: Optional[float] = None
    ) -> SpectralSummary:
        l_max = l_max or self.config.numerics.l_max
        key = (l_max, gamma)
        if key not in self._summaries:
            self._verbose_print(f"Evaluating gamma_l for l = 2..{l_max}.")
            self._summaries[key] = spectral_summary(
                self.unit_state(), gamma=gamma, l_max=l_max, jobs=self.jobs
            )
        return self._summaries[key]

    def _require_gamma(self) -> float:
        gamma = self.config.model.gamma
        if gamma is None:
            raise ConfigurationError(
                "this command needs model.gamma", details=[{"path": "model.gamma"}]
            )
        return gamma

    def _record_stationary(self, results: Dict[str, Any]) -> StationaryState:
        unit = self.unit_state()
        stage = dict(unit.residuals)
        stage["max"] = max(stage.values()) if stage else 0.0
        results["residuals"]["stationary"] = stage
        if stage["max"] > self.config.numerics.tolerances.residual:
            results["warnings"].append(
                f"stationary residual {stage['max']:.3e} above tolerance"
            )
        return unit

    def _record_summary(
        self, summary: SpectralSummary, results: Dict[str, Any]
    ) -> None:
        results["warnings"].extend(summary.warnings)
        results["tables"]["spectrum.csv"] = (summary.to_rows(), SPECTRUM_COLUMNS)

    # ------------------------------------------------------------------
    # command handlers

    def _run_stationary(self, results: Dict[str, Any]) -> None:
        self._progress("🧪 Solving for the radially symmetric stationary state...")
        report = validate_assumptions(self.f, self.g)
        self._verbose_print("Checked the rate laws against the standing assumptions.")
        report.raise_for_failure()
        unit = self._record_stationary(results)
        R_s = unit.physical_radius
        units = rescaled_parameters(R_s, epsilon=self.config.model.epsilon)
        results["tables"]["stationary.csv"] = (unit.to_rows(), STATIONARY_COLUMNS)
        sidecar = unit.sidecar()
        sidecar["assumptions"] = report.model_dump()
        sidecar["units"] = units.model_dump()
        params = self.config.model.params(report.sigma_tilde)
        sidecar["parameters"] = params.model_dump()
        results["documents"]["stationary.json"] = sidecar
        results["summary"].update(
            {
                "R_s": R_s,
                "sigma_prime_1": unit.sigma_prime_1,
                "sigma_tilde": report.sigma_tilde,
            }
        )

    def _run_spectrum(self, results: Dict[str, Any]) -> None:
        self._progress("📈 Computing the modal spectrum of the boundary operator...")
        self._record_stationary(results)
        gamma = self.config.model.gamma
        summary = self.summary(gamma=gamma)
        self._record_summary(summary, results)
        document = summary.summary_json()
        if gamma is not None:
            document["verdict"] = stability_verdict(summary, gamma)
        results["documents"]["summary.json"] = document
        results["summary"].update(document)

    def _run_threshold(self, results: Dict[str, Any]) -> None:
        self._progress("🎯 Locating the surface-tension threshold...")
        unit = self._record_stationary(results)
        gamma = self.config.model.gamma
        summary = self.summary(gamma=gamma)
        self._record_summary(summary, results)

        gammas = [factor * summary.gamma_star for factor in ORACLE_GAMMA_FACTORS]
        degrees = range(0, min(ORACLE_MAX_DEGREE, summary.l_max) + 1)
        self._verbose_print("Cross-checking the multipliers with modal Stokes solves.")
        rows = self._optional(
            "oracle", results, lambda: oracle_report(unit, degrees, gammas)
        )
        if rows is not None:
            results["tables"]["oracle.csv"] = (rows, ORACLE_COLUMNS)
            worst = max(row["rel_err"] for row in rows)
            results["residuals"]["oracle"] = {"max_rel_err": worst}
            if worst > 1e-6:
                results["warnings"].append(f"Stokes oracle relative error {worst:.3e}")

        epsilon0 = self._maybe_threshold(results, gamma, summary)
        document = summary.summary_json(epsilon0)
        if gamma is not None:
            document["verdict"] = stability_verdict(summary, gamma)
        results["documents"]["summary.json"] = document
        results["summary"].update(document)

    def _maybe_threshold(
        self, results: Dict[str, Any], gamma: Optional[float], summary: SpectralSummary
    ) -> Optional[float]:
        settings = self.config.eps_spectrum
        if not settings.threshold:
            return None
        if gamma is None:
            results["warnings"].append("epsilon0 skipped: model.gamma is not set")
            return None
        self._verbose_print("Scanning epsilon for the spectral threshold.")
        threshold = self._optional(
            "epsilon-threshold",
            results,
            lambda: epsilon_threshold(
                gamma,
                self.unit_state(),
                l_max=settings.threshold_l_max,
                n=self.config.numerics.n_modal,
                grid=tuple(settings.epsilon_grid),
                bisection_steps=settings.bisection_steps,
                summary=summary if summary.l_max == settings.threshold_l_max else None,
                jobs=self.jobs,
            ),
        )
        if threshold is None:
            return None
        results["documents"]["threshold.json"] = threshold.model_dump()
        if threshold.saturated:
            results["warnings"].append(
                "spectral bound held on the whole epsilon grid; "
                "epsilon0 is a lower estimate"
            )
        return threshold.epsilon0

    def _run_eps_spectrum(self, results: Dict[str, Any]) -> None:
        self._progress("🔭 Tracking the slow and fast branches in epsilon...")
        unit = self._record_stationary(results)
        gamma = self._require_gamma()
        settings = self.config.eps_spectrum
        n = self.config.numerics.n_modal

        reports = slow_branch_table(settings.modes, settings.epsilons, gamma, unit, n)
        rows = [report.to_row() for report in reports]
        results["tables"]["eps_spectrum.csv"] = (rows, EPS_COLUMNS)
        eps_min = min(settings.epsilons)
        assembly = max(
            assemble_modal_operator(l, eps_min, gamma, unit, n).assembly_residual
            for l in settings.modes
        )
        results["residuals"]["modal_operator"] = {"max_assembly_residual": assembly}

        fits: List[Dict[str, Any]] = []
        if len(settings.epsilons) >= 2:
            for l in settings.modes:
                fit = self._optional(
                    f"slow-branch-fit l={l}",
                    results,
                    lambda l=l: fit_slow_branch(l, gamma, settings.epsilons, unit, n),
                )
                if fit is not None:
                    fits.append({"l": l, "gamma": gamma, **fit})
            results["tables"]["slow_branch_fit.csv"] = (fits, FIT_COLUMNS)

        summary = self.summary(l_max=settings.threshold_l_max, gamma=gamma)
        epsilon0 = self._maybe_threshold(results, gamma, summary)
        document = summary.summary_json(epsilon0)
        results["documents"]["summary.json"] = document
        results["summary"].update(
            {
                "modes": list(settings.modes),
                "epsilon0": epsilon0,
                "gamma_star": summary.gamma_star,
            }
        )

    def _run_simulate(self, results: Dict[str, Any]) -> None:
        settings = self.config.simulate
        if settings.nonlinear:
            self._simulate_radial(results)
        else:
            self._simulate_linear(results)

    def _simulate_linear(self, results: Dict[str, Any]) -> None:
        self._progress("⏱️  Integrating the linearized modal system...")
        unit = self._record_stationary(results)
        settings = self.config.simulate
        eps = self.config.model.epsilon
        if eps <= 0.0:
            raise ConfigurationError(
                "linear modal simulation needs model.epsilon > 0",
                details=[{"path": "model.epsilon"}],
            )
        l = settings.mode
        gamma = self._require_gamma() if l >= 2 else (self.config.model.gamma or 1.0)
        op = assemble_modal_operator(l, eps, gamma, unit, self.config.numerics.n_modal)
        n_phi = op.matrix.shape[0] - 1
        # independent stream per mode so adding modes leaves earlier ones unchanged
        rng = np.random.default_rng([self.config.seed, l])
        phi0 = 1e-2 * settings.perturbation * rng.standard_normal(n_phi)
        trajectory = evolve_linear_mode(
            op,
            (phi0, settings.perturbation),
            settings.horizon,
            settings.dt,
            stepper=settings.stepper,
            skip_fraction=settings.skip_fraction,
        )
        eigen = epsilon_spectrum(l, eps, gamma, unit, self.config.numerics.n_modal)
        expected = float(eigen.slow_branch.real)
        rel = abs(trajectory.fitted_rate - expected) / max(abs(expected), 1e-300)
        results["tables"]["linear_mode.csv"] = (trajectory.to_rows(), LINEAR_COLUMNS)
        document = {
            "mode": l,
            "epsilon": eps,
            "gamma": gamma,
            "stepper": settings.stepper,
            "fitted_rate": trajectory.fitted_rate,
            "fit_r2": trajectory.fit_r2,
            "slow_eigenvalue": expected,
            "rel_err": rel,
        }
        results["documents"]["simulation.json"] = document
        results["residuals"]["modal_operator"] = {
            "max_assembly_residual": op.assembly_residual
        }
        results["summary"].update(document)

    def _simulate_radial(self, results: Dict[str, Any]) -> None:
        self._progress("🌱 Evolving the radially symmetric free boundary...")
        unit = self._record_stationary(results)
        settings = self.config.simulate
        eps = self.config.model.epsilon
        R0 = 1.0 + settings.perturbation
        trajectory = simulate_radial_nonlinear(
            unit.f,
            unit.g,
            eps,
            R0,
            settings.horizon,
            settings.dt,
            n=settings.n_radial,
            radius_bounds=tuple(settings.radius_bounds),
            reference_radius=1.0,
        )
        results["tables"]["trajectory.csv"] = (trajectory.to_rows(), RADIAL_COLUMNS)
        results["residuals"]["simulate"] = {
            "max_volume_residual": trajectory.max_volume_residual
        }
        document: Dict[str, Any] = {
            "epsilon": eps,
            "R0": R0,
            "status": trajectory.status,
            "max_volume_residual": trajectory.max_volume_residual,
        }
        if trajectory.status == "blow-up":
            results["warnings"].append("radius left the configured window (blow-up)")
        else:
            fit = self._optional(
                "radial-rate-fit",
                results,
                lambda: fit_radial_rate(trajectory, 1.0, settings.skip_fraction),
            )
            if fit is not None:
                document["fitted_rate"], document["fit_r2"] = fit
            if eps > 0.0:
                # degree 0 does not depend on gamma
                gamma = self.config.model.gamma or 1.0
                eigen = epsilon_spectrum(
                    0, eps, gamma, unit, self.config.numerics.n_modal
                )
                document["slow_eigenvalue"] = float(eigen.slow_branch.real)
            else:
                document["slow_eigenvalue"] = alpha0_for_state(unit)
        results["documents"]["simulation.json"] = document
        results["summary"].update(document)

    def _run_sweep(self, results: Dict[str, Any]) -> None:
        self._progress("🗺️  Sweeping the (gamma, epsilon) stability map...")
        unit = self._record_stationary(results)
        settings = self.config.sweep
        summary = self.summary(l_max=settings.l_max)
        n = self.config.numerics.n_modal
        degrees = range(0, settings.l_max + 1)
        cells = [
            (factor * summary.gamma_star, float(eps))
            for factor in settings.gamma_factors
            for eps in settings.epsilons
        ]
        self._verbose_print(f"{len(cells)} cells over degrees 0..{settings.l_max}.")

        def evaluate(cell: Tuple[float, float]) -> Dict[str, Any]:
            gamma, eps = cell
            try:
                value, l_arg = max_nonzero_real_part(degrees, eps, gamma, unit, n)
            except (TumorSpectraError, np.linalg.LinAlgError) as e:
                block = error_block(e)
                logger.warning(
                    "sweep cell gamma=%g eps=%g failed: %s",
                    gamma,
                    eps,
                    block["message"],
                )
                return {
                    "gamma": gamma,
                    "epsilon": eps,
                    "max_nonzero_re": None,
                    "stable": None,
                    "l_arg": None,
                    "status": "failed",
                    "error": block,
                }
            return {
                "gamma": gamma,
                "epsilon": eps,
                "max_nonzero_re": value,
                "stable": value < 0.0,
                "l_arg": l_arg,
                "status": "ok",
            }

        if self.jobs > 1:
            with ThreadPoolExecutor(max_workers=self.jobs) as pool:
                rows = list(pool.map(evaluate, cells))
        else:
            rows = [evaluate(cell) for cell in cells]
        rows.sort(key=lambda row: (row["gamma"], row["epsilon"]))

        failed = [row for row in rows if row["status"] == "failed"]
        for row in failed:
            results["warnings"].append(
                f"sweep cell gamma={row['gamma']!r}, "
                f"epsilon={row['epsilon']!r} failed: {row['error']['message']}"
            )
        results["tables"]["stability_map.csv"] = (rows, SWEEP_COLUMNS)
        document = summary.summary_json()
        document["cells"] = len(rows)
        document["failed_cells"] = len(failed)
        results["documents"]["summary.json"] = document
        results["summary"].update(document)
