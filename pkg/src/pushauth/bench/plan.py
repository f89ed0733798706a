"""Study plans: which variants to run, how many attempts, which models.

A variant is either a password baseline (pure latency, no network) or a
device variant driven end to end through the service by a scripted agent.
The default plan reproduces the published desk-study shape: five variants,
8 attempts per series, 30 series each, with injected latency models whose
means and spreads match the reported per-variant results.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, replace
from pathlib import Path
from typing import Any

from pushauth.agent.profile import AgentProfile, LatencyModel
from pushauth.errors import ConfigError
from pushauth.protocol.model import DeviceClass

TIMING_MODES = ("accounted", "wall")


@dataclass(frozen=True)
class VariantPlan:
    """One authentication mechanism to benchmark."""

    name: str
    agent_profile: AgentProfile | None = None
    password_latency: LatencyModel | None = None
    attempts_per_series: int = 8
    series: int = 1
    failure_prob: float = 0.0

    def __post_init__(self) -> None:
        if not self.name:
            raise ConfigError("variant needs a name")
        if (self.agent_profile is None) == (self.password_latency is None):
            raise ConfigError(
                f"variant {self.name}: set exactly one of agent_profile/password_latency"
            )
        if self.attempts_per_series < 1:
            raise ConfigError(f"variant {self.name}: attempts_per_series must be >= 1")
        if self.series < 1:
            raise ConfigError(f"variant {self.name}: series must be >= 1")
        if not 0.0 <= self.failure_prob <= 1.0:
            raise ConfigError(f"variant {self.name}: failure_prob must be in [0, 1]")

    @property
    def attempts(self) -> int:
        return self.attempts_per_series * self.series

    @property
    def is_password(self) -> bool:
        return self.password_latency is not None

    def to_dict(self) -> dict[str, Any]:
        doc: dict[str, Any] = {
            "name": self.name,
            "attempts_per_series": self.attempts_per_series,
            "series": self.series,
            "failure_prob": self.failure_prob,
        }
        if self.agent_profile is not None:
            doc["agent_profile"] = self.agent_profile.to_dict()
        if self.password_latency is not None:
            doc["password_latency"] = self.password_latency.to_dict()
        return doc

    @classmethod
    def from_dict(cls, raw: dict[str, Any]) -> VariantPlan:
        profile = raw.get("agent_profile")
        password = raw.get("password_latency")
        return cls(
            name=raw.get("name", ""),
            agent_profile=AgentProfile.from_dict(profile) if profile else None,
            password_latency=LatencyModel.from_dict(password) if password else None,
            attempts_per_series=int(raw.get("attempts_per_series", 8)),
            series=int(raw.get("series", 1)),
            failure_prob=float(raw.get("failure_prob", 0.0)),
        )


@dataclass(frozen=True)
class StudyPlan:
    variants: tuple[VariantPlan, ...] = ()
    seed: int = 0
    ttl_ms: int = 60_000
    time_scale: float = 1.0
    timing: str = "accounted"
    successes_only: bool = False
    overhead_ms: float = 0.0
    shuffle: bool = False

    def __post_init__(self) -> None:
        names = [v.name for v in self.variants]
        if len(names) != len(set(names)):
            raise ConfigError("variant names must be unique")
        if self.ttl_ms <= 0:
            raise ConfigError("ttl_ms must be positive")
        if self.time_scale <= 0:
            raise ConfigError("time_scale must be positive")
        if self.timing not in TIMING_MODES:
            raise ConfigError(f"timing must be one of {TIMING_MODES}")
        if self.overhead_ms < 0:
            raise ConfigError("overhead_ms must be >= 0")

    def to_dict(self) -> dict[str, Any]:
        return {
            "variants": [v.to_dict() for v in self.variants],
            "seed": self.seed,
            "ttl_ms": self.ttl_ms,
            "time_scale": self.time_scale,
            "timing": self.timing,
            "successes_only": self.successes_only,
            "overhead_ms": self.overhead_ms,
            "shuffle": self.shuffle,
        }

    def digest(self) -> str:
        canonical = json.dumps(self.to_dict(), sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(canonical.encode("utf-8")).hexdigest()

    def with_overrides(self, **overrides: Any) -> StudyPlan:
        effective = {k: v for k, v in overrides.items() if v is not None}
        return replace(self, **effective) if effective else self

    @classmethod
    def from_dict(cls, raw: dict[str, Any]) -> StudyPlan:
        if not isinstance(raw, dict):
            raise ConfigError("plan must be a JSON object")
        return cls(
            variants=tuple(VariantPlan.from_dict(v) for v in raw.get("variants", [])),
            seed=int(raw.get("seed", 0)),
            ttl_ms=int(raw.get("ttl_ms", 60_000)),
            time_scale=float(raw.get("time_scale", 1.0)),
            timing=raw.get("timing", "accounted"),
            successes_only=bool(raw.get("successes_only", False)),
            overhead_ms=float(raw.get("overhead_ms", 0.0)),
            shuffle=bool(raw.get("shuffle", False)),
        )

    @classmethod
    def from_file(cls, path: str | Path) -> StudyPlan:
        try:
            raw = json.loads(Path(path).read_text())
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"cannot read plan {path}: {exc}") from exc
        return cls.from_dict(raw)

    def to_file(self, path: str | Path) -> None:
        Path(path).write_text(json.dumps(self.to_dict(), indent=2) + "\n")


# Per-variant targets of the desk study being reproduced: mean seconds,
# sd seconds, success rate. The latency models are calibrated so the
# measurement pipeline lands on these numbers by construction.
TABLE_TARGETS: dict[str, tuple[float, float, float]] = {
    "password": (4.6, 1.8, 0.97),
    "phone_button": (6.6, 2.3, 1.00),
    "phone_biometric": (7.4, 2.0, 0.98),
    "watch_button": (4.5, 2.0, 0.96),
    "watch_biometric": (4.6, 1.5, 0.98),
}


def _device_variant(
    name: str,
    device_class: DeviceClass,
    confirm_method: str,
    series: int,
    overhead_ms: float,
) -> VariantPlan:
    mean_s, sd_s, success = TABLE_TARGETS[name]
    profile = AgentProfile(
        user_id=f"bench-{name}",
        device_class=device_class,
        label=f"bench {name}",
        confirm_method=confirm_method,
        confirm_delay=LatencyModel.normal(mean_s * 1000.0 - overhead_ms, sd_s * 1000.0),
        unlock_delay=LatencyModel.zero(),
        biometric_failure_prob=0.0,
        decision_policy="auto_confirm",
    )
    return VariantPlan(
        name=name,
        agent_profile=profile,
        attempts_per_series=8,
        series=series,
        failure_prob=1.0 - success,
    )


def default_study_plan(
    seed: int = 42,
    series: int = 30,
    time_scale: float = 1.0,
    overhead_ms: float = 0.0,
) -> StudyPlan:
    """The calibrated five-variant plan (8 attempts x ``series`` per variant)."""
    password_mean, password_sd, password_success = TABLE_TARGETS["password"]
    variants = (
        VariantPlan(
            name="password",
            password_latency=LatencyModel.normal(
                password_mean * 1000.0, password_sd * 1000.0
            ),
            attempts_per_series=8,
            series=series,
            failure_prob=1.0 - password_success,
        ),
        _device_variant("phone_button", DeviceClass.PHONE, "button", series, overhead_ms),
        _device_variant("phone_biometric", DeviceClass.PHONE, "biometric", series, overhead_ms),
        _device_variant("watch_button", DeviceClass.WATCH, "button", series, overhead_ms),
        _device_variant("watch_biometric", DeviceClass.WATCH, "biometric", series, overhead_ms),
    )
    return StudyPlan(
        variants=variants,
        seed=seed,
        time_scale=time_scale,
        overhead_ms=overhead_ms,
    )
