"""Side files fed from the structlog pipeline.

``error_diagnostics_processor`` copies WARNING+ events (config errors, output
errors, environment overrides) to ``settings.error_log_file``;
``run_summary_processor`` appends one line per simulated run to
``settings.runs_log_file``, so a long sweep leaves a per-run trail even when
the console log is not kept. Both files rotate by size.
"""

from __future__ import annotations

from datetime import datetime, timezone
from pathlib import Path
from typing import Any

from src.config import settings

_SKIP_KEYS = frozenset({"event", "level", "timestamp", "_record", "_from_structlog"})

_RUN_FIELDS = (
    "policy",
    "seed",
    "completed",
    "mean_response_ms",
    "txn_ios",
    "clust_ios",
    "pages_used",
    "throughput_tps",
)


class RotatingFileWriter:
    """Append-only line writer; past ``max_bytes`` the file moves to ``<name>.1``."""

    def __init__(self, path: Path, max_bytes: int, backup_count: int = 1) -> None:
        self._path = path
        self._max_bytes = max_bytes
        self._backup_count = backup_count
        self._path.parent.mkdir(parents=True, exist_ok=True)

    def _backup(self, index: int) -> Path:
        return self._path.with_name(f"{self._path.name}.{index}")

    def write(self, line: str) -> None:
        with self._path.open("a", encoding="utf-8") as fh:
            fh.write(line if line.endswith("\n") else line + "\n")
        if self._path.stat().st_size >= self._max_bytes:
            self._rotate()

    def _rotate(self) -> None:
        self._backup(self._backup_count).unlink(missing_ok=True)
        for index in range(self._backup_count - 1, 0, -1):
            if self._backup(index).exists():
                self._backup(index).rename(self._backup(index + 1))
        self._path.rename(self._backup(1))


_writers: dict[str, RotatingFileWriter] = {}


def _writer(name: str, path: str) -> RotatingFileWriter:
    if name not in _writers:
        _writers[name] = RotatingFileWriter(
            Path(path), max_bytes=settings.diagnostics_max_size_mb * 1024 * 1024
        )
    return _writers[name]


def _timestamp(event_dict: dict[str, Any]) -> str:
    return event_dict.get("timestamp") or datetime.now(timezone.utc).strftime(
        "%Y-%m-%dT%H:%M:%S+00:00"
    )


def error_diagnostics_processor(
    logger: Any, method_name: str, event_dict: dict[str, Any]
) -> dict[str, Any]:
    """Copy WARNING+ events to the error file; empty fields are left out."""
    level = event_dict.get("level", "")
    if level not in ("warning", "error", "critical"):
        return event_dict
    kv = " ".join(
        f"{key}={value}"
        for key, value in event_dict.items()
        if key not in _SKIP_KEYS and value is not None
    )
    line = f"[{_timestamp(event_dict)}] {level.upper():<8} {event_dict.get('event', '?')}  {kv}"
    _writer("errors", settings.error_log_file).write(line)
    return event_dict


def run_summary_processor(
    logger: Any, method_name: str, event_dict: dict[str, Any]
) -> dict[str, Any]:
    """Append one line per ``run_finished`` event; missing criteria show as ``-``."""
    if event_dict.get("event") != "run_finished":
        return event_dict
    parts = " ".join(f"{key}={event_dict.get(key, '-')}" for key in _RUN_FIELDS)
    _writer("runs", settings.runs_log_file).write(f"[{_timestamp(event_dict)}] {parts}")
    return event_dict
