import importlib
import logging
import os
import sys
from pathlib import Path
from typing import Any

import logger_config
from src.config import ROOT_DIR, fixture_path, get_settings


def test_defaults(mocker: Any):
    mocker.patch.dict(os.environ, {}, clear=True)
    s = get_settings()
    assert s.fixtures_dir == ROOT_DIR / "fixtures"
    assert s.reports_dir == ROOT_DIR / "reports"
    assert (s.default_bound, s.valset_cap, s.image_cap) == (6, 4096, 10000)
    assert (s.age_max, s.epoch) == (25, 12)


def test_env_overrides(mocker: Any, tmp_path: Path):
    mocker.patch.dict(os.environ, {"LIVREFINE_DEFAULT_BOUND": "9", "LIVREFINE_REPORTS": str(tmp_path)})
    s = get_settings()
    assert s.default_bound == 9
    assert s.reports_dir == tmp_path


def test_invalid_int_falls_back(mocker: Any):
    mocker.patch.dict(os.environ, {"LIVREFINE_VALSET_CAP": "beaucoup"})
    warn = mocker.patch("src.config.logger.warning")
    assert get_settings().valset_cap == 4096
    warn.assert_called_once()


def test_fixture_path_adds_suffix(mocker: Any, tmp_path: Path):
    mocker.patch.dict(os.environ, {"LIVREFINE_FIXTURES": str(tmp_path)})
    assert fixture_path("dbi") == tmp_path / "dbi.json"
    assert fixture_path("dbi.json") == tmp_path / "dbi.json"


def _console_handlers() -> list:
    return [h for h in logger_config.logger.handlers if h.get_name() == logger_config.CONSOLE_HANDLER]


def test_log_level_from_env(mocker: Any):
    mocker.patch.dict(os.environ, {"LIVREFINE_LOG_LEVEL": "debug"})
    importlib.reload(logger_config)
    try:
        assert logger_config.logger.level == logging.DEBUG
        (console,) = _console_handlers()
        assert isinstance(console, logging.StreamHandler)
        assert console.stream is sys.stderr
        assert not logger_config.logger.propagate
    finally:
        logger_config.logger.setLevel(logging.INFO)


def test_reload_keeps_single_console_handler(mocker: Any):
    mocker.patch.dict(os.environ, {"LIVREFINE_LOG_LEVEL": "warning"})
    importlib.reload(logger_config)
    importlib.reload(logger_config)
    try:
        assert len(_console_handlers()) == 1
        assert logger_config.logger.level == logging.WARNING
    finally:
        logger_config.logger.setLevel(logging.INFO)


def test_missing_or_empty_variable_uses_default(mocker: Any):
    mocker.patch.dict(os.environ, {"LIVREFINE_REPORTS": ""}, clear=True)
    warn = mocker.patch("src.config.logger.warning")
    s = get_settings()
    assert s.reports_dir == ROOT_DIR / "reports"
    assert s.epoch == 12
    warn.assert_not_called()
