"""
Tests for the environment-driven configuration.
"""

import config


def test_defaults_validate(tmp_path, monkeypatch):
    monkeypatch.chdir(tmp_path)
    result = config.validate_config()
    assert result["valid"]
    assert result["errors"] == []
    assert (tmp_path / config.RESULTS_DIR).is_dir()


def test_invalid_settings_are_reported(tmp_path, monkeypatch):
    monkeypatch.chdir(tmp_path)
    monkeypatch.setattr(config, "LOG_LEVEL", "LOUD")
    monkeypatch.setattr(config, "WILDCARD_SYMBOL", "a")
    result = config.validate_config()
    assert not result["valid"]
    assert any("LOG_LEVEL" in error for error in result["errors"])
    assert any("WILDCARD_SYMBOL" in error for error in result["errors"])


def test_low_run_count_is_a_warning(tmp_path, monkeypatch):
    monkeypatch.chdir(tmp_path)
    monkeypatch.setattr(config, "DEFAULT_RUNS", 1)
    result = config.validate_config()
    assert result["valid"]
    assert result["warnings"]


def test_config_dict():
    settings = config.get_config_dict()
    assert settings["default_seed"] == config.DEFAULT_SEED
    assert settings["wildcard_symbol"] == config.WILDCARD_SYMBOL
    assert set(settings) >= {"results_dir", "log_level", "default_runs", "decimal_digits"}
