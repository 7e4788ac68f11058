"""
Logging for salemcount.

Every record carries a ``correlation_id``: the id of the CLI invocation or
``SalemCounter`` call that produced it, so one census run or table build can
be pulled out of a shared log. Records are rendered as a single text line or
as one JSON object per line.
"""

import json
import logging
import sys
import uuid
from contextlib import contextmanager
from contextvars import ContextVar
from datetime import datetime
from pathlib import Path
from typing import Any, Dict, Iterator, List, Optional

NO_ID = "no-correlation-id"
TEXT_FORMAT = "[%(asctime)s] [%(levelname)s] [%(name)s] [%(correlation_id)s] %(message)s"

_run_id: ContextVar[Optional[str]] = ContextVar("salemcount_run_id", default=None)

# Attributes every LogRecord has; anything else came in through ``extra=``.
_RECORD_FIELDS = frozenset(vars(logging.LogRecord("", 0, "", 0, "", (), None))) | {"message", "asctime"}


class CorrelationFilter(logging.Filter):
    """Stamp records with the active run id unless they already carry one.

    An id set on the filter itself takes precedence over the context-wide
    one; handlers built by ``setup_logger`` share a filter that defers to
    the context.
    """

    def __init__(self) -> None:
        super().__init__()
        self._pinned: Optional[str] = None

    def set_correlation_id(self, correlation_id: str) -> None:
        self._pinned = correlation_id

    def clear_correlation_id(self) -> None:
        self._pinned = None

    @property
    def correlation_id(self) -> Optional[str]:
        return self._pinned or _run_id.get()

    def filter(self, record: logging.LogRecord) -> bool:
        if not getattr(record, "correlation_id", None):
            record.correlation_id = self.correlation_id or NO_ID
        return True


class CorrelationFormatter(logging.Formatter):
    """Text formatter tolerant of records that bypassed the filter."""

    def format(self, record: logging.LogRecord) -> str:
        record.__dict__.setdefault("correlation_id", NO_ID)
        return super().format(record)


class JsonFormatter(logging.Formatter):
    """One JSON object per record; ``extra=`` fields become top-level keys."""

    def format(self, record: logging.LogRecord) -> str:
        payload: Dict[str, Any] = {
            "timestamp": datetime.fromtimestamp(record.created).isoformat(),
            "level": record.levelname,
            "logger": record.name,
            "message": record.getMessage(),
            "correlation_id": getattr(record, "correlation_id", NO_ID),
        }
        if record.exc_info:
            payload["exception"] = self.formatException(record.exc_info)
        extras = {k: v for k, v in vars(record).items() if k not in _RECORD_FIELDS}
        for key, value in extras.items():
            payload.setdefault(key, value)
        return json.dumps(payload, default=str)


_shared_filter = CorrelationFilter()


def set_correlation_id(correlation_id: str) -> None:
    _run_id.set(correlation_id)


def clear_correlation_id() -> None:
    _run_id.set(None)


def current_correlation_id() -> Optional[str]:
    return _run_id.get()


@contextmanager
def with_correlation_id(correlation_id: Optional[str] = None) -> Iterator[str]:
    """Tag everything logged inside the block with ``correlation_id``.

    A fresh uuid4 is used when no id is given. The previous id is restored
    on exit.
    """
    token = _run_id.set(correlation_id or str(uuid.uuid4()))
    try:
        yield _run_id.get() or NO_ID
    finally:
        _run_id.reset(token)


def log_with_context(
    logger: logging.Logger,
    level: int,
    msg: str,
    correlation_id: Optional[str] = None,
    **kwargs: Any,
) -> None:
    """``logger.log`` with a one-off correlation id for this record only."""
    extra = dict(kwargs.pop("extra", None) or {})
    if correlation_id:
        extra["correlation_id"] = correlation_id
    logger.log(level, msg, extra=extra, **kwargs)


def _handlers(log_file: Optional[str]) -> List[logging.Handler]:
    # stderr only: stdout is reserved for CSV/JSON tables
    handlers: List[logging.Handler] = [logging.StreamHandler(sys.stderr)]
    if log_file:
        path = Path(log_file)
        path.parent.mkdir(parents=True, exist_ok=True)
        handlers.append(logging.FileHandler(path, encoding="utf-8"))
    return handlers


def setup_logger(
    level: str = "INFO",
    log_file: Optional[str] = None,
    logger_name: str = "salemcount",
    format_as_json: bool = False,
) -> logging.Logger:
    """
    (Re)configure the package logger.

    Existing handlers are closed and replaced, so calling this twice does
    not duplicate output.

    Args:
        level: DEBUG, INFO, WARNING or ERROR; unknown names fall back to INFO
        log_file: Also append records to this file
        logger_name: Logger to configure
        format_as_json: Emit JSON lines instead of text

    Returns:
        The configured logger
    """
    logger = logging.getLogger(logger_name)
    for old in list(logger.handlers):
        logger.removeHandler(old)
        old.close()
    logger.setLevel(getattr(logging, level.upper(), logging.INFO))

    formatter: logging.Formatter = (
        JsonFormatter() if format_as_json else CorrelationFormatter(TEXT_FORMAT, datefmt="%Y-%m-%d %H:%M:%S")
    )
    for handler in _handlers(log_file):
        handler.setFormatter(formatter)
        handler.addFilter(_shared_filter)
        logger.addHandler(handler)
    return logger
