import logging
import pytest
import sys
from pathlib import Path

# Add project root to path
sys.path.append(str(Path(__file__).parent.parent))

from uhatlab.config import ENV_MAX_ENUM, ConfigLoader, Settings, get_settings, use_settings


def test_defaults_when_file_is_missing(tmp_path):
    """A missing config file falls back to the built-in defaults."""
    settings = ConfigLoader(tmp_path / 'absent.yaml').load()
    assert settings == Settings()
    assert settings.max_enum == 2_000_000


def test_yaml_values_override_defaults(tmp_path):
    config = tmp_path / 'config.yaml'
    config.write_text('verify_len: 5\nlog_level: INFO\n', encoding='utf-8')
    settings = ConfigLoader(config).load()
    assert settings.verify_len == 5
    assert settings.log_level == 'INFO'
    assert settings.tie_n_max == 8


def test_environment_budget(tmp_path, monkeypatch):
    """UHATLAB_MAX_ENUM wins over the file; a non-integer is ignored."""
    config = tmp_path / 'config.yaml'
    config.write_text('max_enum: 10\n', encoding='utf-8')
    monkeypatch.setenv(ENV_MAX_ENUM, '42')
    assert ConfigLoader(config).load().max_enum == 42
    monkeypatch.setenv(ENV_MAX_ENUM, 'many')
    assert ConfigLoader(config).load().max_enum == 10


def test_invalid_values(tmp_path):
    config = tmp_path / 'config.yaml'
    config.write_text('max_enum: lots\n', encoding='utf-8')
    with pytest.raises(ValueError):
        ConfigLoader(config).load()
    config.write_text('- a list\n', encoding='utf-8')
    with pytest.raises(ValueError):
        ConfigLoader(config).load()


def test_unknown_keys_are_ignored(tmp_path, caplog):
    config = tmp_path / 'config.yaml'
    config.write_text('colour: blue\nverify_len: 3\n', encoding='utf-8')
    with caplog.at_level(logging.WARNING, logger='uhatlab.config'):
        settings = ConfigLoader(config).load()
    assert settings.verify_len == 3
    assert 'colour' in caplog.text


def test_shipped_config_matches_defaults():
    """config.yaml at the repository root spells out the defaults."""
    assert ConfigLoader().load().as_dict() == Settings().as_dict()


def test_settings_override():
    custom = Settings(verify_len=3)
    use_settings(custom)
    try:
        assert get_settings() is custom
    finally:
        use_settings(None)
    assert get_settings().verify_len == 8
