"""
Result persistence and console summaries for tumor-spectra.

Numeric files (CSV tables and JSON documents) carry no timestamps, so two
runs with the same configuration and version produce byte-identical files.
Timestamps and hashes live only in manifest.json.
"""

from datetime import datetime, timezone
from pathlib import Path
from typing import Any, Dict, List, Optional

from . import __version__
from .analysis.geometry import CUTOFF_PROFILE
from .config import RunConfig
from .tools.files import (
    atomic_write_json,
    atomic_write_text,
    canonical_json_bytes,
    csv_text,
    sha256_hex,
)

MANIFEST_NAME = "manifest.json"


def config_hash(config: RunConfig) -> str:
    """sha256 of the canonical JSON form of the full configuration."""
    return sha256_hex(canonical_json_bytes(config.model_dump(mode="json")))


def utc_now() -> str:
    return datetime.now(timezone.utc).isoformat(timespec="seconds")


class ResultWriter:
    """
    Writes a results dictionary to an output directory.

    Every table becomes a CSV, every document a sorted, indented JSON file,
    and a manifest listing all of them (with their sha256) is written last.
    """

    def __init__(self, out_dir: Path, include_errors: bool = True):
        """
        Initialize the writer.

        Args:
            out_dir: Output directory (created if missing)
            include_errors: Whether recorded stage errors go into the manifest
        """
        self.out_dir = Path(out_dir)
        self.include_errors = include_errors

    def write(
        self,
        results: Dict[str, Any],
        config: RunConfig,
        started_at: Optional[str] = None,
    ) -> Dict[str, Any]:
        """
        Persist all outputs of a command.

        Args:
            results: StabilityAnalyzer results
            config: Configuration the results were computed from
            started_at: ISO timestamp of the start of the run

        Returns:
            The manifest that was written

        Raises:
            OSError: On write failures, with the offending path
        """
        self.out_dir.mkdir(parents=True, exist_ok=True)
        files: List[Dict[str, Any]] = []

        for name in sorted(results["tables"]):
            rows, columns = results["tables"][name]
            text = csv_text(rows, columns)
            atomic_write_text(self.out_dir / name, text)
            files.append(self._entry(name, text.encode("utf-8"), "csv", len(rows)))

        for name in sorted(results["documents"]):
            path = self.out_dir / name
            atomic_write_json(path, results["documents"][name])
            files.append(self._entry(name, path.read_bytes(), "json"))

        manifest = {
            "command": results["command"],
            "success": results["success"],
            "version": __version__,
            "config_hash": config_hash(config),
            "seed": config.seed,
            "started_at": started_at or utc_now(),
            "finished_at": utc_now(),
            "cutoff_profile": CUTOFF_PROFILE,
            "residuals": results["residuals"],
            "warnings": results["warnings"],
            "files": files,
        }
        if self.include_errors:
            manifest["errors"] = results["errors"]
        atomic_write_json(self.out_dir / MANIFEST_NAME, manifest)
        return manifest

    @staticmethod
    def _entry(
        name: str, data: bytes, kind: str, rows: Optional[int] = None
    ) -> Dict[str, Any]:
        entry = {
            "name": name,
            "kind": kind,
            "bytes": len(data),
            "sha256": sha256_hex(data),
        }
        if rows is not None:
            entry["rows"] = rows
        return entry


def _fmt(value: Any) -> str:
    if isinstance(value, float):
        return f"{value:.10g}"
    if value is None:
        return "n/a"
    return str(value)


def format_console_summary(results: Dict[str, Any], out_dir: Path) -> str:
    """Human-readable summary printed by the CLI after a successful run."""
    lines = [f"✅ {results['command']} finished"]
    for key in sorted(results["summary"]):
        lines.append(f"   {key}: {_fmt(results['summary'][key])}")
    if results["warnings"]:
        lines.append(f"⚠️  {len(results['warnings'])} warning(s):")
        lines.extend(f"   - {w}" for w in results["warnings"])
    if results["errors"]:
        lines.append(f"❌ {len(results['errors'])} stage(s) failed:")
        lines.extend(f"   - {e['stage']}: {e['message']}" for e in results["errors"])
    lines.append(f"📁 Outputs written to {out_dir}")
    return "\n".join(lines)
