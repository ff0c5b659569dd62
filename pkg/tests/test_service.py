import json
import sys

import pytest
from loguru import logger

from config import DEFAULTS, NumericSettings
from log_config.logging_config import LOG_DEFAULTS, get_log_dir, get_logger, resolve_log_settings, setup_logging
from mcp_resources import get_settings_document


@pytest.fixture
def log_dir(tmp_path, monkeypatch):
    monkeypatch.setenv("CAPSWITCH_LOG_DIR", str(tmp_path / "logs"))
    yield tmp_path / "logs"
    logger.remove()
    logger.add(sys.stderr)


def test_settings_document():
    doc = json.loads(get_settings_document(DEFAULTS))
    assert doc["settings"]["support_threshold"] == 1e-9
    assert doc["reference_instance"] == {"lambda": 2.0, "mu": 1.0, "h": 1.0, "c": 100.0, "s0": 100.0, "s1": 100.0}
    assert "mn:M,N" in doc["policy_syntax"]
    tuned = json.loads(get_settings_document(NumericSettings.from_mapping({"truncation_margin": 80})))
    assert tuned["settings"]["truncation_margin"] == 80


def test_log_files_split_by_level(log_dir):
    assert get_log_dir() == log_dir
    setup_logging({"console_level": "WARNING", "compression": "gz"})
    log = get_logger("CapacitySwitch.Test")
    log.info("solver detail")
    log.error("solver failure")
    logger.complete()
    logger.remove()
    app = (log_dir / "app.log").read_text(encoding="utf-8")
    err = (log_dir / "err.log").read_text(encoding="utf-8")
    assert "solver detail" in app and "solver failure" not in app
    assert "solver failure" in err
    assert "| INFO" in app


def test_log_settings_sources(monkeypatch):
    monkeypatch.setenv("LOG_ROTATION", "10 MB")
    assert resolve_log_settings()["rotation"] == "10 MB"
    # a logging object in the run config replaces the environment
    from_file = resolve_log_settings({"file_level": "INFO", "colour": "red"})
    assert from_file["file_level"] == "INFO"
    assert from_file["rotation"] == LOG_DEFAULTS["rotation"]
    assert "colour" not in from_file
