"""Exponential-rate fits on sampled time series."""

import logging
from typing import Optional, Sequence, Tuple

import numpy as np
from scipy.stats import linregress

from ..errors import ConfigurationError, FitError

logger = logging.getLogger(__name__)

#: Leading fraction of the samples treated as transient.
DEFAULT_SKIP_FRACTION = 0.2


def fit_window(
    t: np.ndarray,
    skip_fraction: float = DEFAULT_SKIP_FRACTION,
    window: Optional[Tuple[float, float]] = None,
) -> np.ndarray:
    """
    Boolean mask of the samples used by a fit.

    Args:
        t: Sample times, strictly increasing
        skip_fraction: Fraction of leading samples dropped
        window: Optional explicit (t_start, t_end); overrides skip_fraction
    """
    t = np.asarray(t, dtype=float)
    if window is not None:
        return (t >= window[0]) & (t <= window[1])
    if not 0.0 <= skip_fraction < 1.0:
        raise ConfigurationError(
            f"skip_fraction must lie in [0, 1), got {skip_fraction}"
        )
    mask = np.zeros(t.size, dtype=bool)
    mask[int(np.floor(skip_fraction * t.size)) :] = True
    return mask


def fit_exponential_rate(
    t: Sequence[float],
    y: Sequence[float],
    skip_fraction: float = DEFAULT_SKIP_FRACTION,
    window: Optional[Tuple[float, float]] = None,
) -> Tuple[float, float]:
    """
    Least-squares slope of log y against t.

    Args:
        t: Sample times
        y: Positive samples
        skip_fraction: Leading fraction of samples excluded
        window: Optional explicit time window

    Returns:
        (rate, r2)

    Raises:
        FitError: If a sample in the window is not positive or fewer than
            two samples remain
    """
    t = np.asarray(t, dtype=float)
    y = np.asarray(y, dtype=float)
    if t.shape != y.shape:
        raise ConfigurationError("t and y must have the same shape")
    if np.any(np.diff(t) <= 0.0):
        raise ConfigurationError("sample times must be strictly increasing")
    mask = fit_window(t, skip_fraction, window)
    tw, yw = t[mask], y[mask]
    if tw.size < 2:
        raise FitError(f"fit window holds {tw.size} samples, need at least 2")
    if np.any(~np.isfinite(yw)) or np.any(yw <= 0.0):
        raise FitError(
            "exponential fit needs positive samples in the window",
            details=[{"first_bad_time": float(tw[np.argmax(~(yw > 0.0))])}],
        )
    logy = np.log(yw)
    if np.ptp(logy) == 0.0:
        return 0.0, 1.0
    fit = linregress(tw, logy)
    logger.debug(
        "exponential fit: rate=%.6g r2=%.6g over %d samples",
        fit.slope,
        fit.rvalue**2,
        tw.size,
    )
    return float(fit.slope), float(fit.rvalue**2)
