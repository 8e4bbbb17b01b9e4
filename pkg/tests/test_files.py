"""
Tests for deterministic CSV/JSON output and atomic writes.
"""

import json
import os
from unittest.mock import patch

import numpy as np
import pytest

from tumor_spectra.tools.files import (
    atomic_write_bytes,
    atomic_write_json,
    canonical_json_bytes,
    csv_text,
    format_cell,
    sha256_hex,
    write_csv,
)


class TestFormatCell:
    """Test cases for CSV cell rendering."""

    @pytest.mark.parametrize(
        "value, expected",
        [
            (None, ""),
            (True, "true"),
            (np.bool_(False), "false"),
            (3, "3"),
            (np.int64(-2), "-2"),
            (0.1, "0.1"),
            (np.float64(1e-300), "1e-300"),
            (float("nan"), "nan"),
            (float("-inf"), "-inf"),
            ("plain", "plain"),
            ('say "hi", ok', '"say ""hi"", ok"'),
        ],
    )
    def test_cells(self, value, expected):
        """Test each supported value type."""
        assert format_cell(value) == expected

    def test_float_round_trip(self):
        """Test that rendered floats parse back to the same double."""
        value = 1.0 / 3.0

        assert float(format_cell(value)) == value


class TestCsvText:
    """Test cases for csv_text and write_csv."""

    def test_header_and_column_order(self):
        """Test explicit column order and blank cells for missing keys."""
        rows = [{"b": 1, "a": 0.5}, {"a": 2.0}]

        assert csv_text(rows, ["a", "b"]) == "a,b\n0.5,1\n2.0,\n"

    def test_columns_default_to_first_row(self):
        """Test that the first row's keys become the header."""
        assert csv_text([{"x": 1, "y": 2}]).splitlines()[0] == "x,y"

    def test_empty_table(self):
        """Test that an empty table still has a header line."""
        assert csv_text([], ["l", "gamma_l"]) == "l,gamma_l\n"

    def test_write_csv(self, tmp_path):
        """Test that write_csv creates parent directories."""
        path = write_csv(tmp_path / "sub" / "t.csv", [{"t": 0.0}])

        assert path.read_text(encoding="utf-8") == "t\n0.0\n"


class TestJson:
    """Test cases for canonical and pretty JSON."""

    def test_canonical_bytes_sorted_and_native(self):
        """Test key sorting and conversion of numpy values."""
        data = {"b": np.float64(0.25), "a": np.arange(3), "c": np.bool_(True)}

        assert canonical_json_bytes(data) == b'{"a":[0,1,2],"b":0.25,"c":true}\n'

    def test_non_finite_becomes_null(self):
        """Test that NaN and infinities are written as null."""
        assert canonical_json_bytes([float("nan"), np.inf]) == b"[null,null]\n"

    def test_pretty_json_is_deterministic(self, tmp_path):
        """Test that two writes of equal data are byte-identical."""
        first, second = tmp_path / "a.json", tmp_path / "b.json"
        atomic_write_json(first, {"y": 1.5, "x": [1, 2]})
        atomic_write_json(second, {"x": [1, 2], "y": 1.5})

        assert first.read_bytes() == second.read_bytes()
        assert json.loads(first.read_text()) == {"x": [1, 2], "y": 1.5}

    def test_sha256(self):
        """Test the hex digest of the empty string."""
        assert sha256_hex(b"").startswith("e3b0c44298fc1c14")


class TestAtomicWrite:
    """Test cases for temporary-file-and-rename writes."""

    def test_replaces_existing_file(self, tmp_path):
        """Test that the target is replaced and no temporary is left."""
        path = tmp_path / "out.bin"
        path.write_bytes(b"old")

        atomic_write_bytes(path, b"new")

        assert path.read_bytes() == b"new"
        assert os.listdir(tmp_path) == ["out.bin"]

    def test_failure_keeps_old_content(self, tmp_path):
        """Test that a failed rename leaves the target untouched."""
        path = tmp_path / "out.bin"
        path.write_bytes(b"old")

        with patch("os.replace", side_effect=OSError("disk full")):
            with pytest.raises(OSError, match="out.bin"):
                atomic_write_bytes(path, b"new")

        assert path.read_bytes() == b"old"
        assert os.listdir(tmp_path) == ["out.bin"]
