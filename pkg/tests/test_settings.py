import pytest

from app.config.settings import (
    env_positive_int,
    parse_jobs,
    parse_log_level,
    parse_positive_int,
    setting_errors,
)


def test_parse_positive_int():
    assert parse_positive_int(" 4 ", "X") == 4
    assert parse_positive_int(2, "X") == 2
    for bad in ("0", "-1", "two", True, 1.5):
        with pytest.raises(ValueError):
            parse_positive_int(bad, "X")


def test_parse_jobs_defaults_to_cpu_count():
    assert parse_jobs(None) >= 1
    assert parse_jobs("  ") == parse_jobs(None)
    assert parse_jobs("3") == 3


def test_parse_log_level():
    assert parse_log_level(None) == "INFO"
    assert parse_log_level("debug") == "DEBUG"
    with pytest.raises(ValueError):
        parse_log_level("chatty")


def test_env_positive_int(monkeypatch):
    monkeypatch.delenv("NASGRAPH_CHANNELS", raising=False)
    assert env_positive_int("NASGRAPH_CHANNELS", 16) == 16
    monkeypatch.setenv("NASGRAPH_CHANNELS", "8")
    assert env_positive_int("NASGRAPH_CHANNELS", 16) == 8


def test_setting_errors_names_the_variable(monkeypatch):
    for name in (
        "NASGRAPH_JOBS",
        "NASGRAPH_CHANNELS",
        "NASGRAPH_CELLS",
        "NASGRAPH_MODULES",
        "NASGRAPH_PROBE_RESOLUTION",
        "NASGRAPH_LOG_LEVEL",
    ):
        monkeypatch.delenv(name, raising=False)
    assert setting_errors() == []
    monkeypatch.setenv("NASGRAPH_JOBS", "0")
    monkeypatch.setenv("NASGRAPH_MODULES", "x")
    errors = setting_errors()
    assert len(errors) == 2
    assert any("NASGRAPH_JOBS" in e for e in errors)
    assert any("NASGRAPH_MODULES" in e for e in errors)
