"""Tests for structured JSON logging."""

import io
import json
import logging

import pytest

from pathrank_logging.logger import JSONFormatter, LOGGER_NAME, get_logger, log_step, run_context


@pytest.fixture
def captured():
    logger = get_logger(run_id="run123", stage="unit", level="DEBUG")
    stream = io.StringIO()
    handler = logging.StreamHandler(stream)
    handler.setFormatter(JSONFormatter())
    logger.addHandler(handler)
    try:
        yield stream
    finally:
        logger.removeHandler(handler)
        logger.setLevel("INFO")


def _records(stream: io.StringIO) -> list[dict]:
    return [json.loads(line) for line in stream.getvalue().splitlines()]


def test_logger_emits_json_with_context(captured):
    logging.getLogger(LOGGER_NAME).info("hello world")
    (payload,) = _records(captured)
    assert payload["run_id"] == "run123"
    assert payload["stage"] == "unit"
    assert payload["level"] == "info"
    assert payload["message"] == "hello world"


def test_log_step_merges_run_context(captured):
    with run_context(repetition=2, model="M2"):
        log_step("experiment", "cell_scored", {"auc": 0.75})
        with run_context(model="P"):
            log_step("experiment", "cell_scored", {"auc": 1.0}, severity="warning")
    log_step("experiment", "done")
    first, second, third = _records(captured)
    assert first["component"] == "experiment"
    assert first["op"] == first["message"] == "cell_scored"
    assert (first["repetition"], first["model"], first["auc"]) == (2, "M2", 0.75)
    assert second["model"] == "P" and second["level"] == "warning"
    assert "repetition" not in third


def test_formatter_drops_empty_fields():
    record = logging.LogRecord(LOGGER_NAME, logging.ERROR, __file__, 1, "boom", None, None)
    payload = json.loads(JSONFormatter().format(record))
    assert payload == {"level": "error", "message": "boom"}


def test_get_logger_is_configured_once():
    logger = get_logger(stage="first")
    handlers = list(logger.handlers)
    assert get_logger(stage="second") is logger
    assert logger.handlers == handlers
    assert logger.propagate is False
