"""
Exception hierarchy for tumor-spectra.

Every error carries a human message plus optional structured details so the
CLI can print a machine-readable error block and pick an exit code.
"""

from typing import Any, Dict, List, Optional, Sequence


class TumorSpectraError(Exception):
    """Base class for all errors raised by the package."""

    #: Exit code used by the CLI when this error escapes a command.
    exit_code: int = 3

    def __init__(self, message: str, details: Optional[Sequence[Any]] = None):
        super().__init__(message)
        self.message = message
        self.details: List[Any] = list(details or [])

    def to_dict(self) -> Dict[str, Any]:
        """
        Build the machine-readable error block.

        Returns:
            Dictionary with the error type, message and details
        """
        return {
            "type": type(self).__name__,
            "message": self.message,
            "details": self.details,
        }


class ConfigurationError(TumorSpectraError, ValueError):
    """Invalid configuration, malformed rate specification or bad step size."""

    exit_code = 2


class RateDomainError(TumorSpectraError, ValueError):
    """A rate function was evaluated outside [0, sigma_max]."""

    exit_code = 2


class AssumptionError(TumorSpectraError, ValueError):
    """The rate laws violate one of the standing assumptions on f and g."""

    exit_code = 2

    def __init__(self, message: str, report: Any = None):
        details = [report.model_dump()] if report is not None else []
        super().__init__(message, details)
        self.report = report


class IncompatibleDataError(TumorSpectraError, ValueError):
    """Degree-one Stokes data with a nonzero net force or torque."""

    exit_code = 2


class ThresholdUndefinedError(TumorSpectraError, ValueError):
    """An epsilon threshold was requested at or below gamma_star."""

    exit_code = 2


class InvalidSpecError(TumorSpectraError, ValueError):
    """A Hanzawa map specification outside its diffeomorphism bounds."""

    exit_code = 2


class FitError(TumorSpectraError, ValueError):
    """Exponential fit requested on a window with nonpositive samples."""


class SolverError(TumorSpectraError, RuntimeError):
    """A nonlinear solve or bracketing search failed."""

    def __init__(
        self,
        message: str,
        residual_history: Optional[Sequence[float]] = None,
        details: Optional[Sequence[Any]] = None,
    ):
        self.residual_history = [float(r) for r in (residual_history or [])]
        extra = list(details or [])
        if self.residual_history:
            extra.append({"residual_history": self.residual_history})
        super().__init__(message, extra)


class EigenSolverError(SolverError):
    """Dense eigensolver failure; the offending matrix is dumped to disk."""

    def __init__(self, message: str, dump_path: Optional[str] = None):
        super().__init__(message, details=[{"matrix_dump": dump_path}])
        self.dump_path = dump_path
