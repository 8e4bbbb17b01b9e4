"""
Deterministic file output.

All writes go through a temporary sibling that is fsynced and renamed over
the target, so readers never see a partially written result. Numeric CSV
cells use repr(float), the shortest decimal string that round-trips.
"""

import hashlib
import json
import math
import os
from pathlib import Path
from typing import Any, Iterable, List, Mapping, Optional, Sequence

import numpy as np

_TMP_SUFFIX = ".tmp.tumor-spectra"


def atomic_write_bytes(path: Path, data: bytes) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    tmp = path.with_name(path.name + _TMP_SUFFIX)
    try:
        with tmp.open("wb") as f:
            f.write(data)
            f.flush()
            os.fsync(f.fileno())
        os.replace(str(tmp), str(path))
    except OSError as exc:
        tmp.unlink(missing_ok=True)
        raise OSError(f"failed to write {path}: {exc}") from exc


def atomic_write_text(path: Path, text: str) -> None:
    atomic_write_bytes(path, text.encode("utf-8", errors="strict"))


def _plain(obj: Any) -> Any:
    """Convert numpy scalars and arrays to JSON-native values."""
    if isinstance(obj, Mapping):
        return {str(k): _plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_plain(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return [_plain(v) for v in obj.tolist()]
    if isinstance(obj, np.bool_):
        return bool(obj)
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        value = float(obj)
        return value if math.isfinite(value) else None
    return obj


def canonical_json_bytes(obj: Any) -> bytes:
    text = json.dumps(
        _plain(obj), sort_keys=True, ensure_ascii=False, separators=(",", ":")
    )
    return (text + "\n").encode("utf-8")


def atomic_write_json(path: Path, obj: Any) -> None:
    text = json.dumps(_plain(obj), indent=2, sort_keys=True, ensure_ascii=False)
    atomic_write_text(path, text + "\n")


def sha256_hex(data: bytes) -> str:
    return hashlib.sha256(data).hexdigest()


def format_cell(value: Any) -> str:
    """
    Render one CSV cell.

    Floats use repr (shortest round-trip form), non-finite floats become
    "nan"/"inf"/"-inf", None becomes an empty cell and booleans are lower-case.
    """
    if value is None:
        return ""
    if isinstance(value, (bool, np.bool_)):
        return "true" if value else "false"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        value = float(value)
        if math.isnan(value):
            return "nan"
        if math.isinf(value):
            return "inf" if value > 0 else "-inf"
        return repr(value)
    text = str(value)
    if any(ch in text for ch in ',"\n'):
        text = '"' + text.replace('"', '""') + '"'
    return text


def csv_text(
    rows: Iterable[Mapping[str, Any]], columns: Optional[Sequence[str]] = None
) -> str:
    """
    Serialize records to CSV text with a header row.

    Args:
        rows: Records; missing keys give empty cells
        columns: Column order (defaults to the keys of the first row)
    """
    rows = list(rows)
    if columns is None:
        columns = list(rows[0].keys()) if rows else []
    lines: List[str] = [",".join(columns)]
    for row in rows:
        lines.append(",".join(format_cell(row.get(col)) for col in columns))
    return "\n".join(lines) + "\n"


def write_csv(
    path: Path,
    rows: Iterable[Mapping[str, Any]],
    columns: Optional[Sequence[str]] = None,
) -> Path:
    atomic_write_text(Path(path), csv_text(rows, columns))
    return Path(path)
