"""
Tests for the on-disk stationary-state cache.
"""

import numpy as np
import pytest

from tumor_spectra.tools.cache import StateCache, state_key

NUMERICS = {"n_radial": 128}


class TestStateKey:
    """Test cases for cache keys."""

    def test_key_depends_on_rates_and_numerics(self, linear_rates):
        """Test that changing numerics or scaling changes the key."""
        f, g = linear_rates
        key = state_key(f, g, NUMERICS)

        assert key == state_key(f, g, dict(NUMERICS))
        assert key != state_key(f, g, {"n_radial": 64})
        assert key != state_key(f.scaled(2.0), g, NUMERICS)
        assert len(key) == 64


class TestStateCache:
    """Test cases for get, put and get_or_compute."""

    def test_disabled_cache(self, physical_state):
        """Test that a cache without directory never stores anything."""
        cache = StateCache(None)
        cache.put("k", physical_state)

        assert not cache.enabled
        assert cache.get("k") is None

    def test_round_trip(self, tmp_path, physical_state):
        """Test that a stored state comes back with the same profile."""
        cache = StateCache(tmp_path)
        cache.put("abc", physical_state)

        loaded = cache.get("abc")

        assert cache.hits == 1
        assert loaded.radius == physical_state.radius
        np.testing.assert_array_equal(loaded.sigma, physical_state.sigma)
        assert loaded.grid.n == physical_state.grid.n
        assert loaded.f.to_dict() == physical_state.f.to_dict()
        assert loaded.residuals == physical_state.residuals

    def test_get_or_compute_calls_once(self, tmp_path, physical_state):
        """Test that the second lookup is served from disk."""
        cache = StateCache(tmp_path)
        calls = []

        def compute():
            calls.append(1)
            return physical_state

        cache.get_or_compute("key", compute)
        cache.get_or_compute("key", compute)

        assert len(calls) == 1
        assert (cache.hits, cache.misses) == (1, 1)

    def test_corrupt_entry_is_a_miss(self, tmp_path, physical_state):
        """Test that unreadable metadata is discarded, not raised."""
        cache = StateCache(tmp_path)
        cache.put("bad", physical_state)
        (tmp_path / "bad.json").write_text("{not json", encoding="utf-8")

        assert cache.get("bad") is None
        assert cache.misses == 1

    def test_format_mismatch_is_a_miss(self, tmp_path, physical_state):
        """Test that entries from another cache format are ignored."""
        cache = StateCache(tmp_path)
        cache.put("old", physical_state)
        meta = (tmp_path / "old.json").read_text(encoding="utf-8")
        (tmp_path / "old.json").write_text(
            meta.replace('"format": 1', '"format": 0'), encoding="utf-8"
        )

        assert cache.get("old") is None
