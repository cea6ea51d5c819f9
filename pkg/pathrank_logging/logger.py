"""Structured JSON logging utilities.

This module exposes :func:`get_logger` which returns a standard library logger
configured to emit JSON objects to stderr, and :func:`log_step` which every
analysis module uses to report milestones.  Each record carries the ``run_id``
and ``stage`` of the current invocation plus any fields attached through
:func:`run_context`.  Stdout is left to command payloads (TSV, JSON reports).
"""

from __future__ import annotations

import json
import sys
import uuid
from contextlib import contextmanager
from contextvars import ContextVar
from typing import Any, Dict, Iterator, Optional

# Import the standard library logging module under a different name to avoid
# confusing it with this package.
import logging as _py_logging

from config.settings import SETTINGS

LOGGER_NAME = "pathrank"

_run_context: ContextVar[Optional[Dict[str, Any]]] = ContextVar(
    "pathrank_run_context", default=None
)


class JSONFormatter(_py_logging.Formatter):
    """Format log records as JSON."""

    def format(self, record: _py_logging.LogRecord) -> str:  # type: ignore[override]
        payload: Dict[str, Any] = {
            "run_id": getattr(record, "run_id", None),
            "stage": getattr(record, "stage", None),
            "level": record.levelname.lower(),
            "message": record.getMessage(),
        }
        payload.update(getattr(record, "fields", None) or {})

        if record.exc_info:
            payload["exc_info"] = self.formatException(record.exc_info)

        # Drop keys with ``None`` values to keep the output compact.
        return json.dumps(
            {k: v for k, v in payload.items() if v is not None},
            ensure_ascii=False,
            default=str,
        )


def get_logger(
    run_id: Optional[str] = None,
    stage: Optional[str] = None,
    level: Optional[int | str] = None,
) -> _py_logging.Logger:
    """Return a logger that emits JSON log records.

    Parameters
    ----------
    run_id:
        Identifier for the current invocation.  If omitted, ``RUN_ID`` from the
        settings is used, or a random UUID.
    stage:
        Stage emitting the logs (e.g. the CLI subcommand).
    level:
        Logging level to apply; defaults to ``LOG_LEVEL`` from the settings.
    """

    logger = _py_logging.getLogger(LOGGER_NAME)
    if level is not None:
        logger.setLevel(level)

    if logger.handlers:
        # Already configured; still refresh contextual information.
        for flt in logger.filters:
            if isinstance(flt, _ContextFilter):
                flt.run_id = run_id or flt.run_id
                flt.stage = stage or flt.stage
        return logger

    run_id = run_id or SETTINGS.run_id or str(uuid.uuid4())
    stage = stage or SETTINGS.stage or None

    handler = _py_logging.StreamHandler(stream=sys.stderr)
    handler.setFormatter(JSONFormatter())

    logger.addHandler(handler)
    if level is None:
        logger.setLevel(SETTINGS.log_level.upper())
    logger.propagate = False

    logger.addFilter(_ContextFilter(run_id=run_id, stage=stage))
    return logger


SEVERITY_LEVELS = {
    "critical": _py_logging.CRITICAL,
    "error": _py_logging.ERROR,
    "warning": _py_logging.WARNING,
    "info": _py_logging.INFO,
    "debug": _py_logging.DEBUG,
}


def log_step(
    component: str,
    op: str,
    data: Optional[Dict[str, Any]] = None,
    *,
    severity: str = "info",
) -> None:
    """Emit a structured milestone record.

    ``component`` names the emitting module (``mogen``, ``experiment`` ...),
    ``op`` the milestone.  Fields from the active :func:`run_context` are
    merged in unless ``data`` overrides them.
    """

    fields: Dict[str, Any] = {"component": component, "op": op}
    fields.update(_run_context.get() or {})
    fields.update(data or {})
    level = SEVERITY_LEVELS.get(severity.lower(), _py_logging.INFO)
    get_logger().log(level, op, extra={"fields": fields})


@contextmanager
def run_context(**fields: Any) -> Iterator[None]:
    """Attach ``fields`` to every :func:`log_step` emitted inside the block."""

    current = dict(_run_context.get() or {})
    token = _run_context.set({**current, **fields})
    try:
        yield
    finally:
        _run_context.reset(token)


class _ContextFilter(_py_logging.Filter):
    """Attach ``run_id`` and ``stage`` to log records."""

    def __init__(self, run_id: Optional[str], stage: Optional[str]) -> None:
        super().__init__()
        self.run_id = run_id
        self.stage = stage

    def filter(self, record: _py_logging.LogRecord) -> bool:  # type: ignore[override]
        record.run_id = self.run_id
        record.stage = self.stage
        return True


__all__ = ["get_logger", "log_step", "run_context", "SEVERITY_LEVELS", "JSONFormatter"]
