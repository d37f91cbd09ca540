"""Run configuration: one TOML file of flat key-value pairs.

Unknown keys are rejected so typos fail loudly. The scoring API key is the
single value that an environment variable (WIKITOX_API_KEY) may override.
"""

from __future__ import annotations

import os
from dataclasses import dataclass, fields

try:
    import tomllib
except ModuleNotFoundError:          # Python 3.10
    import tomli as tomllib

from .errors import ConfigError

API_KEY_ENV = "WIKITOX_API_KEY"


@dataclass
class Config:
    language: str = "en"
    toxicity_threshold: float = 0.8
    censor_days: int = 100
    matching_tolerance: float = 0.1
    bootstrap: int = 1000
    repetitions: int = 100
    seed: int = 0
    scorer_endpoint: str = ""
    scorer_api_key: str = ""
    bot_usernames: tuple = ()
    bot_suffix_heuristic: bool = True
    exclude_anonymous: bool = True
    exclude_self: bool = True
    include_talk_subpages: bool = True
    control_excludes_toxic_recipients: bool = True
    center_on: str = "virtual_event"
    exclude_day_zero: bool = False

    def __post_init__(self):
        if not 0.0 < self.toxicity_threshold < 1.0:
            raise ConfigError(f"toxicity_threshold {self.toxicity_threshold} "
                              "outside (0, 1)")
        if self.censor_days < 0:
            raise ConfigError("censor_days must be >= 0")
        if self.matching_tolerance <= 0:
            raise ConfigError("matching_tolerance must be positive")
        if self.bootstrap < 0 or self.repetitions < 1:
            raise ConfigError("bootstrap must be >= 0 and repetitions >= 1")
        if self.center_on not in ("virtual_event", "nearest_nontoxic_comment"):
            raise ConfigError(f"unknown center_on {self.center_on!r}")


_FIELD_TYPES = {f.name: f.type for f in fields(Config)}


def load_config(path) -> Config:
    try:
        with open(path, "rb") as handle:
            raw = tomllib.load(handle)
    except tomllib.TOMLDecodeError as exc:
        raise ConfigError(f"{path}: invalid TOML: {exc}") from exc
    known = {f.name for f in fields(Config)}
    unknown = sorted(set(raw) - known)
    if unknown:
        raise ConfigError(f"{path}: unknown config keys: {', '.join(unknown)}")
    values = {}
    for name, value in raw.items():
        default = getattr(Config, name)
        if isinstance(default, bool):
            if not isinstance(value, bool):
                raise ConfigError(f"{path}: {name} must be a boolean")
        elif isinstance(default, int):
            if isinstance(value, bool) or not isinstance(value, int):
                raise ConfigError(f"{path}: {name} must be an integer")
        elif isinstance(default, float):
            if isinstance(value, bool) or not isinstance(value, (int, float)):
                raise ConfigError(f"{path}: {name} must be a number")
            value = float(value)
        elif isinstance(default, str):
            if not isinstance(value, str):
                raise ConfigError(f"{path}: {name} must be a string")
        elif isinstance(default, tuple):
            if not isinstance(value, list) or not all(isinstance(v, str) for v in value):
                raise ConfigError(f"{path}: {name} must be a list of strings")
            value = tuple(value)
        values[name] = value
    env_key = os.environ.get(API_KEY_ENV)
    if env_key:
        values["scorer_api_key"] = env_key
    return Config(**values)
