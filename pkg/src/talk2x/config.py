"""Engine configuration: one flat key = value file, env-overridable.

Every key can be overridden by a TALK2X_<KEY> environment variable, so a
deployment can keep a checked-in config file and still rotate endpoints
or budgets without touching it.
"""

from __future__ import annotations

import os
from dataclasses import dataclass, fields
from pathlib import Path

ENV_PREFIX = "TALK2X_"


class ConfigError(Exception):
    """The config file or an override cannot be parsed."""


@dataclass
class AppConfig:
    # embedding
    embedder: str = "local"  # local | remote
    dimension: int = 256
    embed_endpoint: str = ""
    embed_model: str = "text-embedding-3-small"
    # llm
    llm: str = "http"  # http | scripted
    llm_endpoint: str = ""
    llm_model: str = "gpt-4o-mini"
    llm_script: str = ""  # path to a scripted transcript (llm = scripted)
    llm_script_loop: bool = False
    # agent budgets
    max_iterations: int = 8
    top_k: int = 4
    snippet_max_chars: int = 500
    memory_window: int = 12
    system_prompt: str = ""  # empty means the documented default
    # chunking defaults
    chunk_size: int = 1000
    chunk_overlap: int = 200
    # service
    log_path: str = "talk2x.log.jsonl"
    cors_origins: str = "*"
    session_timeout_minutes: int = 60
    request_timeout: float = 30.0


_FIELD_TYPES = {f.name: f.type for f in fields(AppConfig)}


def _coerce(name: str, raw: str):
    target = _FIELD_TYPES[name]
    raw = raw.strip()
    try:
        if target in ("int", int):
            return int(raw)
        if target in ("float", float):
            return float(raw)
        if target in ("bool", bool):
            if raw.lower() in ("1", "true", "yes", "on"):
                return True
            if raw.lower() in ("0", "false", "no", "off"):
                return False
            raise ValueError(f"not a boolean: {raw!r}")
    except ValueError as exc:
        raise ConfigError(f"config key {name!r}: {exc}") from exc
    return raw


def load_config(path: str | Path | None = None, environ: dict | None = None) -> AppConfig:
    """Build an AppConfig from defaults, then the file, then the environment."""
    environ = os.environ if environ is None else environ
    values: dict = {}
    if path is not None:
        try:
            text = Path(path).read_text(encoding="utf-8")
        except OSError as exc:
            raise ConfigError(f"cannot read config file {path}: {exc}") from exc
        for lineno, line in enumerate(text.splitlines(), start=1):
            stripped = line.strip()
            if not stripped or stripped.startswith("#"):
                continue
            if "=" not in stripped:
                raise ConfigError(f"{path}:{lineno}: expected 'key = value'")
            key, _, raw = stripped.partition("=")
            key = key.strip().lower()
            if key not in _FIELD_TYPES:
                raise ConfigError(f"{path}:{lineno}: unknown config key {key!r}")
            values[key] = _coerce(key, raw)
    for name in _FIELD_TYPES:
        env_value = environ.get(ENV_PREFIX + name.upper())
        if env_value is not None:
            values[name] = _coerce(name, env_value)
    return AppConfig(**values)
