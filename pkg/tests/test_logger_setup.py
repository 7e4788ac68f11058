import json
import logging

from salemcount.core.logger import (
    CorrelationFilter,
    CorrelationFormatter,
    JsonFormatter,
    clear_correlation_id,
    current_correlation_id,
    log_with_context,
    set_correlation_id,
    setup_logger,
    with_correlation_id,
)


def _record(msg="census done", level=logging.INFO):
    return logging.LogRecord(
        name="salemcount.core.census", level=level, pathname="", lineno=0, msg=msg, args=(), exc_info=None
    )


def test_text_log_file_carries_correlation_id(tmp_path):
    log_file = tmp_path / "logs" / "run.log"
    logger = setup_logger("DEBUG", str(log_file))
    with with_correlation_id("census-m2"):
        logging.getLogger("salemcount.core.census").info("Census m=2 H=10: class=5")
    content = log_file.read_text()
    assert "Census m=2 H=10" in content
    assert "census-m2" in content


def test_json_log_file_one_object_per_record(tmp_path):
    log_file = tmp_path / "run.jsonl"
    logger = setup_logger("INFO", str(log_file), format_as_json=True)
    logger.info("table built", extra={"rows": 3})
    obj = json.loads(log_file.read_text().splitlines()[-1])
    assert obj["message"] == "table built"
    assert obj["rows"] == 3
    assert obj["correlation_id"] == "no-correlation-id"


def test_setup_logger_replaces_handlers(tmp_path):
    setup_logger("INFO", str(tmp_path / "a.log"))
    logger = setup_logger("WARNING")
    assert len(logger.handlers) == 1
    assert logger.level == logging.WARNING


def test_filter_keeps_explicit_id():
    f = CorrelationFilter()
    f.set_correlation_id("context")
    rec = _record()
    rec.correlation_id = "explicit"
    f.filter(rec)
    assert rec.correlation_id == "explicit"
    f.clear_correlation_id()
    fresh = _record()
    f.filter(fresh)
    assert fresh.correlation_id == "no-correlation-id"


def test_formatters():
    text = CorrelationFormatter("[%(correlation_id)s] %(message)s").format(_record())
    assert text == "[no-correlation-id] census done"

    try:
        raise ArithmeticError("boom")
    except ArithmeticError:
        import sys

        rec = logging.LogRecord("x", logging.ERROR, "", 0, "failed", (), sys.exc_info())
    data = json.loads(JsonFormatter().format(rec))
    assert data["level"] == "ERROR"
    assert "ArithmeticError" in data["exception"]


def test_correlation_context_restores_previous():
    set_correlation_id("outer")
    with with_correlation_id() as cid:
        assert current_correlation_id() == cid != "outer"
    assert current_correlation_id() == "outer"
    clear_correlation_id()
    assert current_correlation_id() is None


def test_log_with_context_sets_id(tmp_path):
    log_file = tmp_path / "ctx.jsonl"
    logger = setup_logger("INFO", str(log_file), format_as_json=True)
    log_with_context(logger, logging.INFO, "slice done", correlation_id="slice-7", extra={"b1": -3})
    obj = json.loads(log_file.read_text().splitlines()[-1])
    assert obj["correlation_id"] == "slice-7"
    assert obj["b1"] == -3
