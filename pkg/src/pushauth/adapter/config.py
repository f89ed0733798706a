"""Adapter configuration."""

from __future__ import annotations

import json
from dataclasses import dataclass, field, replace
from pathlib import Path

from pushauth.errors import ConfigError

DEFAULT_TIMEOUT_MS = 60_000
DEFAULT_PROMPT = "Confirm the login on your device. Comparison code: {code}"


@dataclass(frozen=True)
class AdapterConfig:
    service_url: str
    user_mapping: dict[str, str] = field(default_factory=dict)
    timeout_ms: int = DEFAULT_TIMEOUT_MS
    prompt_template: str = DEFAULT_PROMPT

    def __post_init__(self) -> None:
        if self.timeout_ms <= 0:
            raise ConfigError("timeout_ms must be positive")
        if self.prompt_template.count("{code}") != 1:
            raise ConfigError("prompt_template must contain {code} exactly once")

    @classmethod
    def from_file(cls, path: str | Path) -> AdapterConfig:
        try:
            raw = json.loads(Path(path).read_text())
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"cannot read adapter config {path}: {exc}") from exc
        if not isinstance(raw, dict) or "service_url" not in raw:
            raise ConfigError(f"adapter config {path} must set service_url")
        known = {f for f in cls.__dataclass_fields__}
        unknown = set(raw) - known
        if unknown:
            raise ConfigError(f"unknown adapter config keys: {sorted(unknown)}")
        return cls(**raw)

    def with_timeout(self, timeout_ms: int | None) -> AdapterConfig:
        return replace(self, timeout_ms=timeout_ms) if timeout_ms else self
