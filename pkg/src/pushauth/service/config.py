"""Service configuration: file, environment, and flag layering."""

from __future__ import annotations

import json
import os
from dataclasses import dataclass, replace
from pathlib import Path

from pushauth.errors import ConfigError

LISTEN_ENV_VAR = "PUSHAUTH_LISTEN"

DEFAULT_TTL_MS = 60_000
DEFAULT_LONG_POLL_MAX_WAIT_MS = 25_000
DEFAULT_SWEEP_INTERVAL_MS = 100


@dataclass(frozen=True)
class ServiceConfig:
    listen_address: str = "127.0.0.1:8470"
    default_ttl_ms: int = DEFAULT_TTL_MS
    persistence_path: str | None = None
    long_poll_max_wait_ms: int = DEFAULT_LONG_POLL_MAX_WAIT_MS
    sweep_interval_ms: int = DEFAULT_SWEEP_INTERVAL_MS

    def __post_init__(self) -> None:
        if self.default_ttl_ms <= 0:
            raise ConfigError("default_ttl_ms must be positive")
        if self.long_poll_max_wait_ms <= 0:
            raise ConfigError("long_poll_max_wait_ms must be positive")
        if self.sweep_interval_ms <= 0:
            raise ConfigError("sweep_interval_ms must be positive")
        host_port(self.listen_address)

    @classmethod
    def from_file(cls, path: str | Path) -> ServiceConfig:
        try:
            raw = json.loads(Path(path).read_text())
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"cannot read config {path}: {exc}") from exc
        if not isinstance(raw, dict):
            raise ConfigError(f"config {path} must be a JSON object")
        known = {f for f in cls.__dataclass_fields__}
        unknown = set(raw) - known
        if unknown:
            raise ConfigError(f"unknown config keys: {sorted(unknown)}")
        return cls(**raw)

    def with_overrides(self, **overrides: object) -> ServiceConfig:
        """Apply non-None overrides (flags beat file values)."""
        effective = {k: v for k, v in overrides.items() if v is not None}
        return replace(self, **effective) if effective else self


def host_port(listen_address: str) -> tuple[str, int]:
    """Split a host:port string, validating the port."""
    host, sep, port = listen_address.rpartition(":")
    if not sep or not host:
        raise ConfigError(f"listen_address must be host:port, got {listen_address!r}")
    try:
        port_num = int(port)
    except ValueError as exc:
        raise ConfigError(f"bad port in {listen_address!r}") from exc
    if not 0 <= port_num <= 65535:
        raise ConfigError(f"port out of range in {listen_address!r}")
    return host, port_num


def load_config(
    config_path: str | None = None, env: dict[str, str] | None = None, **flag_overrides: object
) -> ServiceConfig:
    """Layer defaults < config file < environment < flags."""
    env = os.environ if env is None else env
    config = ServiceConfig.from_file(config_path) if config_path else ServiceConfig()
    listen_env = env.get(LISTEN_ENV_VAR)
    if listen_env:
        config = config.with_overrides(listen_address=listen_env)
    return config.with_overrides(**flag_overrides)
