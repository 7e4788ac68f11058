"""
Census cache.

A census is stored as JSON lines: one header object carrying m, H, the tool
version and the three counts, followed by one object per Salem record. A
reload reproduces the ``CensusSummary`` exactly, so tables built from the
cache are byte-identical to tables built from a fresh enumeration.
"""

from __future__ import annotations

import json
import logging
import threading
from fractions import Fraction
from pathlib import Path
from typing import Any, Dict, Optional

from salemcount.core.census import CensusSummary, SalemRecord, enumerate_census
from salemcount.core.config import CensusConfig
from salemcount.core.error_handling import CacheMismatch, ErrorCategory, SalemError

logger = logging.getLogger(__name__)


def census_filename(m: int, H: Fraction) -> str:
    """``census_m{m}_H{H}.jsonl`` with ``/`` written as ``_``."""
    return f"census_m{m}_H{str(Fraction(H)).replace('/', '_')}.jsonl"


def header_of(summary: CensusSummary) -> Dict[str, Any]:
    from salemcount import __version__

    return {
        "m": summary.m,
        "H": str(summary.H),
        "tool_version": __version__,
        "class_count": summary.class_count,
        "irreducible_count": summary.irreducible_count,
        "reducible_count": summary.reducible_count,
    }


def dump_jsonl(summary: CensusSummary) -> str:
    lines = [json.dumps(header_of(summary), sort_keys=True)]
    lines += [json.dumps(rec.to_dict(), sort_keys=True) for rec in summary.records]
    return "\n".join(lines) + "\n"


class CensusStore:
    """File-backed cache of enumerated censuses, one file per (m, H)."""

    def __init__(self, cache_dir: str) -> None:
        self.cache_dir = Path(cache_dir)
        self._lock = threading.Lock()

    def path_for(self, m: int, H: Fraction) -> Path:
        return self.cache_dir / census_filename(m, H)

    def load(self, m: int, H: Fraction) -> Optional[CensusSummary]:
        """Cached census, or ``None`` when no file exists."""
        h = Fraction(H)
        path = self.path_for(m, h)
        if not path.exists():
            return None
        try:
            lines = [ln for ln in path.read_text(encoding="utf-8").splitlines() if ln.strip()]
            header = json.loads(lines[0])
            header_m, header_h = int(header["m"]), Fraction(str(header["H"]))
            header_version = header.get("tool_version")
            records = tuple(SalemRecord.from_dict(json.loads(ln)) for ln in lines[1:])
        except (AttributeError, OSError, IndexError, KeyError, TypeError, ValueError) as e:
            raise SalemError(
                f"Unreadable census cache {path}",
                error_category=ErrorCategory.STORAGE,
                additional_context={"path": str(path), "error": str(e)},
            ) from e
        from salemcount import __version__

        if header_version != __version__:
            raise CacheMismatch(
                "Census cache was written by a different salemcount release",
                additional_context={"path": str(path), "reason": "tool_version", "header": header},
            )
        if header_m != m or header_h != h:
            raise CacheMismatch(
                "Census cache header does not match the request",
                additional_context={"path": str(path), "m": m, "H": str(h), "header": header},
            )
        return CensusSummary(
            m=m,
            H=h,
            class_count=int(header["class_count"]),
            irreducible_count=int(header["irreducible_count"]),
            reducible_count=int(header["reducible_count"]),
            records=records,
        )

    def save(self, summary: CensusSummary) -> Path:
        path = self.path_for(summary.m, summary.H)
        with self._lock:
            self.cache_dir.mkdir(parents=True, exist_ok=True)
            tmp = path.with_suffix(".jsonl.tmp")
            tmp.write_text(dump_jsonl(summary), encoding="utf-8")
            tmp.replace(path)
        logger.debug(f"Census written to {path}")
        return path

    def load_or_compute(self, m: int, H: Fraction, cfg: Optional[CensusConfig] = None) -> CensusSummary:
        try:
            cached = self.load(m, H)
        except CacheMismatch as e:
            if e.additional_context.get("reason") != "tool_version":
                raise
            logger.warning(f"Stale census cache for m={m} H={H}; recomputing")
            cached = None
        if cached is not None:
            logger.info(f"Census cache hit for m={m} H={H}")
            return cached
        logger.info(f"Census cache miss for m={m} H={H}")
        summary = enumerate_census(m, H, cfg)
        self.save(summary)
        return summary


def get_census(
    m: int, H: Fraction, cache_dir: Optional[str] = None, cfg: Optional[CensusConfig] = None
) -> CensusSummary:
    """Enumerate, going through the cache when a directory is given."""
    if cache_dir:
        return CensusStore(cache_dir).load_or_compute(m, H, cfg)
    return enumerate_census(m, H, cfg)
