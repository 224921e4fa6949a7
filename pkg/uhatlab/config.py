from dataclasses import dataclass, asdict
from pathlib import Path
from typing import Optional
import functools
import logging
import os

import yaml

logger = logging.getLogger(__name__)

ENV_MAX_ENUM = 'UHATLAB_MAX_ENUM'
DEFAULT_CONFIG_PATH = Path(__file__).parent.parent / 'config.yaml'


@dataclass(frozen=True)
class Settings:
    """Enumeration budgets and default bounds shared by the library and the CLI."""
    max_enum: int = 2_000_000
    max_extensions: int = 500_000
    default_max_len: int = 8
    classify_bound: int = 4
    binary_check_len: int = 5
    verify_len: int = 8
    tie_n_max: int = 8
    log_level: str = 'WARNING'

    def as_dict(self) -> dict:
        return asdict(self)


class ConfigLoader:
    """Reads config.yaml and merges it over the built-in defaults."""

    def __init__(self, config_path: Optional[Path] = None):
        self.config_path = Path(config_path) if config_path else DEFAULT_CONFIG_PATH
        self.defaults = Settings().as_dict()

    def load(self) -> Settings:
        values = dict(self.defaults)
        values.update(self._read_file())

        env_budget = os.environ.get(ENV_MAX_ENUM)
        if env_budget:
            try:
                values['max_enum'] = int(env_budget)
            except ValueError:
                logger.warning("Ignoring %s=%r: not an integer", ENV_MAX_ENUM, env_budget)

        return Settings(**values)

    def _read_file(self) -> dict:
        """Return the recognised keys of the YAML file, or {} if it is missing."""
        try:
            with open(self.config_path, 'r', encoding='utf-8') as f:
                config = yaml.safe_load(f) or {}
        except FileNotFoundError:
            logger.debug("No config at %s, using defaults", self.config_path)
            return {}

        if not isinstance(config, dict):
            raise ValueError(f"Invalid config format in {self.config_path}: expected a mapping")

        unknown = set(config) - set(self.defaults)
        if unknown:
            logger.warning("Unknown config keys ignored: %s", ', '.join(sorted(unknown)))

        result = {}
        for key, value in config.items():
            if key not in self.defaults:
                continue
            expected = type(self.defaults[key])
            if not isinstance(value, expected):
                raise ValueError(f"'{key}' must be of type {expected.__name__}")
            result[key] = value
        return result


_override: Optional[Settings] = None


@functools.lru_cache(maxsize=1)
def _load_default() -> Settings:
    return ConfigLoader().load()


def get_settings() -> Settings:
    """Effective settings: an explicit override (set by the CLI) or the default file."""
    if _override is not None:
        return _override
    return _load_default()


def use_settings(settings: Optional[Settings]) -> None:
    global _override
    _override = settings
