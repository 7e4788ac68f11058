"""
Run provenance for reproducible tables.

A run with a provenance directory leaves ``run_<correlation-id>.json`` next
to its output: command, parameters, config hash, git SHA, tool version,
timings and any errors. A CSV behind a plot can then be traced to the run
that made it.
"""

from __future__ import annotations

import hashlib
import logging
import subprocess
import time
from fractions import Fraction
from pathlib import Path
from typing import Any, Dict, List, Optional

from pydantic import BaseModel, Field

logger = logging.getLogger(__name__)


def _now_ms() -> int:
    return int(time.time() * 1000)


def compute_sha256_of_text(text: str) -> str:
    return hashlib.sha256(text.encode("utf-8")).hexdigest()


def git_head() -> Optional[str]:
    """SHA of ``HEAD`` in the working directory, if it is a git checkout."""
    try:
        out = subprocess.run(
            ["git", "rev-parse", "HEAD"], capture_output=True, text=True, check=True, timeout=5
        )
    except (OSError, subprocess.SubprocessError):
        return None
    return out.stdout.strip() or None


def plain(value: Any) -> Any:
    """Reduce parameters and results to JSON scalars, lists and dicts."""
    if value is None or isinstance(value, (bool, int, float, str)):
        return value
    if isinstance(value, Fraction):
        return str(value)
    if isinstance(value, dict):
        return {str(k): plain(v) for k, v in value.items()}
    if isinstance(value, (list, tuple, set, frozenset)):
        return [plain(v) for v in value]
    return str(value)


class ErrorEvent(BaseModel):
    timestamp_ms: int = Field(default_factory=_now_ms)
    message: str
    category: Optional[str] = None


class RunProvenance(BaseModel):
    correlation_id: str
    command: str
    parameters: Dict[str, Any] = Field(default_factory=dict)
    tool_version: str
    git_sha: Optional[str] = None
    config_path: Optional[str] = None
    config_hash: Optional[str] = None
    started_ms: int = Field(default_factory=_now_ms)
    finished_ms: Optional[int] = None
    duration_ms: Optional[int] = None
    success: Optional[bool] = None
    result_summary: Dict[str, Any] = Field(default_factory=dict)
    error_events: List[ErrorEvent] = Field(default_factory=list)

    def finish(self, success: bool, result_summary: Optional[Dict[str, Any]]) -> None:
        self.finished_ms = _now_ms()
        self.duration_ms = self.finished_ms - self.started_ms
        self.success = success
        self.result_summary = plain(result_summary or {})


class ProvenanceRecorder:
    """Tracks the current run and writes its sidecar on completion.

    Without an output directory the run is still tracked in memory
    (``current``) but nothing is written.
    """

    def __init__(self, output_dir: Optional[str] = None) -> None:
        self.output_dir = Path(output_dir) if output_dir else None
        self.current: Optional[RunProvenance] = None

    def start_run(
        self,
        correlation_id: str,
        command: str,
        parameters: Dict[str, Any],
        config_path: Optional[str] = None,
    ) -> None:
        from salemcount import __version__

        config_hash = None
        if config_path:
            try:
                config_hash = compute_sha256_of_text(Path(config_path).read_text(encoding="utf-8"))
            except OSError:
                logger.debug(f"Config {config_path} not readable; no hash recorded")
        self.current = RunProvenance(
            correlation_id=correlation_id,
            command=command,
            parameters=plain(parameters),
            tool_version=__version__,
            git_sha=git_head(),
            config_path=config_path,
            config_hash=config_hash,
        )

    def record_error(self, message: str, *, category: Optional[str] = None) -> None:
        if self.current is not None:
            self.current.error_events.append(ErrorEvent(message=message, category=category))

    def complete_run(self, success: bool, result_summary: Optional[Dict[str, Any]] = None) -> Optional[Path]:
        """Close the run; returns the sidecar path when one was written."""
        run = self.current
        if run is None:
            return None
        run.finish(success, result_summary)
        if self.output_dir is None:
            return None
        sidecar = self.output_dir / f"run_{run.correlation_id}.json"
        try:
            self.output_dir.mkdir(parents=True, exist_ok=True)
            sidecar.write_text(run.model_dump_json(indent=2), encoding="utf-8")
        except OSError as e:
            logger.warning(f"Could not write provenance sidecar {sidecar}: {e}")
            return None
        logger.debug(f"Provenance written to {sidecar}")
        return sidecar
