"""
On-disk cache of unscaled stationary states.

Entries are keyed by the sha256 of the canonical JSON of the rate
specifications and the numerical settings that determine the profile. Each
entry is a pair ``<key>.npz`` (sigma, v) plus ``<key>.json`` (scalars).
"""

import io
import json
import logging
import threading
from pathlib import Path
from typing import Any, Callable, Dict, Optional, Union

import numpy as np

from ..models.profiles import StationaryState
from ..models.rates import RateFunction, RateFunctionSpec, make_rate_function
from .chebyshev import RadialGrid
from .files import (
    atomic_write_bytes,
    atomic_write_json,
    canonical_json_bytes,
    sha256_hex,
)

logger = logging.getLogger(__name__)

#: Bumped whenever the stored layout changes.
CACHE_FORMAT = 1


def state_key(f: RateFunction, g: RateFunction, numerics: Dict[str, Any]) -> str:
    """Hash identifying the stationary state of (f, g) under ``numerics``."""
    payload = {
        "format": CACHE_FORMAT,
        "f": f.to_dict(),
        "g": g.to_dict(),
        "sigma_max": [f.sigma_max, g.sigma_max],
        "numerics": numerics,
    }
    return sha256_hex(canonical_json_bytes(payload))


class StateCache:
    """
    Directory-backed cache of stationary states.

    A ``None`` or empty directory disables caching: ``get`` always misses
    and ``put`` is a no-op.
    """

    def __init__(self, directory: Optional[Union[str, Path]]):
        self.directory = Path(directory).expanduser() if directory else None
        self._lock = threading.Lock()
        self.hits = 0
        self.misses = 0

    @property
    def enabled(self) -> bool:
        return self.directory is not None

    def _paths(self, key: str):
        return self.directory / f"{key}.npz", self.directory / f"{key}.json"

    def get(self, key: str) -> Optional[StationaryState]:
        if not self.enabled:
            return None
        arrays_path, meta_path = self._paths(key)
        if not (arrays_path.exists() and meta_path.exists()):
            with self._lock:
                self.misses += 1
            return None
        try:
            meta = json.loads(meta_path.read_text(encoding="utf-8"))
            with np.load(arrays_path) as data:
                sigma, v = data["sigma"].copy(), data["v"].copy()
            state = _rebuild(meta, sigma, v)
        except (OSError, KeyError, ValueError) as e:
            logger.warning("discarding unreadable cache entry %s: %s", key[:12], e)
            with self._lock:
                self.misses += 1
            return None
        with self._lock:
            self.hits += 1
        logger.info("stationary state cache hit %s", key[:12])
        return state

    def put(self, key: str, state: StationaryState) -> None:
        if not self.enabled:
            return
        arrays_path, meta_path = self._paths(key)
        buffer = io.BytesIO()
        np.savez(buffer, sigma=state.sigma, v=state.v)
        meta = {
            "format": CACHE_FORMAT,
            "radius": state.radius,
            "n": state.grid.n,
            "sigma_prime_1": state.sigma_prime_1,
            "f": state.f.spec.model_dump(exclude_none=True),
            "g": state.g.spec.model_dump(exclude_none=True),
            "f_scale": state.f.scale,
            "g_scale": state.g.scale,
            "sigma_max": [state.f.sigma_max, state.g.sigma_max],
            "residuals": state.residuals,
        }
        with self._lock:
            atomic_write_bytes(arrays_path, buffer.getvalue())
            atomic_write_json(meta_path, meta)
        logger.debug("stored stationary state %s", key[:12])

    def get_or_compute(
        self, key: str, compute: Callable[[], StationaryState]
    ) -> StationaryState:
        state = self.get(key)
        if state is None:
            state = compute()
            self.put(key, state)
        return state


def _rebuild(
    meta: Dict[str, Any], sigma: np.ndarray, v: np.ndarray
) -> StationaryState:
    if meta.get("format") != CACHE_FORMAT:
        raise ValueError(f"cache format {meta.get('format')} != {CACHE_FORMAT}")
    f_max, g_max = meta["sigma_max"]
    f = make_rate_function(RateFunctionSpec(**meta["f"]), f_max)
    g = make_rate_function(RateFunctionSpec(**meta["g"]), g_max)
    f, g = f.scaled(meta["f_scale"]), g.scaled(meta["g_scale"])
    radius = float(meta["radius"])
    n = int(meta["n"])
    if sigma.shape != (n,) or v.shape != (n,):
        raise ValueError("cached arrays do not match the stored node count")
    return StationaryState(
        radius=radius,
        grid=RadialGrid(n, "chebyshev-lobatto", radius),
        sigma=sigma,
        sigma_prime_1=float(meta["sigma_prime_1"]),
        v=v,
        f=f,
        g=g,
        residuals={k: float(x) for k, x in meta.get("residuals", {}).items()},
    )
