"""Agent behavior profiles and human-latency models.

A profile captures how a simulated device answers: its class, whether it
sits locked between attempts, how the user confirms (button tap or
fingerprint hold), how long each step takes, and what decision policy to
follow. Latency models are stochastic stand-ins for human reaction time.
"""

from __future__ import annotations

import json
import random
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

from pushauth.errors import ConfigError
from pushauth.protocol.model import DeviceClass

CONFIRM_METHODS = ("button", "biometric")
DECISION_POLICIES = ("auto_confirm", "auto_deny", "scripted")


@dataclass(frozen=True)
class LatencyModel:
    """constant(value), normal(mean, sd) truncated at 0, or zero."""

    kind: str = "zero"
    value_ms: float = 0.0
    mean_ms: float = 0.0
    sd_ms: float = 0.0

    def __post_init__(self) -> None:
        if self.kind not in ("zero", "constant", "normal"):
            raise ConfigError(f"unknown latency model kind {self.kind!r}")
        if self.kind == "constant" and self.value_ms < 0:
            raise ConfigError("constant latency must be >= 0")
        if self.kind == "normal" and self.sd_ms < 0:
            raise ConfigError("latency sd must be >= 0")

    @classmethod
    def zero(cls) -> LatencyModel:
        return cls("zero")

    @classmethod
    def constant(cls, value_ms: float) -> LatencyModel:
        return cls("constant", value_ms=value_ms)

    @classmethod
    def normal(cls, mean_ms: float, sd_ms: float) -> LatencyModel:
        return cls("normal", mean_ms=mean_ms, sd_ms=sd_ms)

    def sample(self, rng: random.Random) -> float:
        """One draw in milliseconds, always >= 0."""
        if self.kind == "zero":
            return 0.0
        if self.kind == "constant":
            return self.value_ms
        for _ in range(1000):
            draw = rng.gauss(self.mean_ms, self.sd_ms)
            if draw >= 0.0:
                return draw
        return 0.0

    def mean(self) -> float:
        # Truncation shifts the true mean slightly above mean_ms; close
        # enough for ordering checks and plan sanity.
        if self.kind == "constant":
            return self.value_ms
        if self.kind == "normal":
            return self.mean_ms
        return 0.0

    def to_dict(self) -> dict[str, Any]:
        if self.kind == "zero":
            return {"kind": "zero"}
        if self.kind == "constant":
            return {"kind": "constant", "value_ms": self.value_ms}
        return {"kind": "normal", "mean_ms": self.mean_ms, "sd_ms": self.sd_ms}

    @classmethod
    def from_dict(cls, raw: dict[str, Any]) -> LatencyModel:
        if not isinstance(raw, dict) or "kind" not in raw:
            raise ConfigError(f"latency model must be an object with kind, got {raw!r}")
        return cls(
            kind=raw["kind"],
            value_ms=float(raw.get("value_ms", 0.0)),
            mean_ms=float(raw.get("mean_ms", 0.0)),
            sd_ms=float(raw.get("sd_ms", 0.0)),
        )


def _default_locked(device_class: DeviceClass) -> bool:
    # Phones ride in a pocket locked; watches stay unlocked on the wrist.
    return device_class is DeviceClass.PHONE


@dataclass(frozen=True)
class AgentProfile:
    user_id: str
    device_class: DeviceClass = DeviceClass.PHONE
    label: str = "simulated device"
    locked_at_rest: bool | None = None
    unlock_delay: LatencyModel = field(default_factory=LatencyModel.zero)
    confirm_method: str = "button"
    confirm_delay: LatencyModel = field(default_factory=LatencyModel.zero)
    biometric_failure_prob: float = 0.0
    decision_policy: str = "auto_confirm"
    scripted_decisions: tuple[str, ...] = ()

    def __post_init__(self) -> None:
        if not self.user_id:
            raise ConfigError("profile needs a user_id")
        if self.confirm_method not in CONFIRM_METHODS:
            raise ConfigError(f"unknown confirm_method {self.confirm_method!r}")
        if self.decision_policy not in DECISION_POLICIES:
            raise ConfigError(f"unknown decision_policy {self.decision_policy!r}")
        if not 0.0 <= self.biometric_failure_prob <= 1.0:
            raise ConfigError("biometric_failure_prob must be in [0, 1]")
        if self.locked_at_rest is None:
            object.__setattr__(
                self, "locked_at_rest", _default_locked(self.device_class)
            )

    def to_dict(self) -> dict[str, Any]:
        return {
            "user_id": self.user_id,
            "device_class": self.device_class.value,
            "label": self.label,
            "locked_at_rest": self.locked_at_rest,
            "unlock_delay": self.unlock_delay.to_dict(),
            "confirm_method": self.confirm_method,
            "confirm_delay": self.confirm_delay.to_dict(),
            "biometric_failure_prob": self.biometric_failure_prob,
            "decision_policy": self.decision_policy,
            "scripted_decisions": list(self.scripted_decisions),
        }

    @classmethod
    def from_dict(cls, raw: dict[str, Any]) -> AgentProfile:
        if not isinstance(raw, dict):
            raise ConfigError("profile must be a JSON object")
        try:
            device_class = DeviceClass(raw.get("device_class", "phone"))
        except ValueError:
            raise ConfigError(f"unknown device_class {raw.get('device_class')!r}")
        return cls(
            user_id=raw.get("user_id", ""),
            device_class=device_class,
            label=raw.get("label", "simulated device"),
            locked_at_rest=raw.get("locked_at_rest"),
            unlock_delay=LatencyModel.from_dict(raw.get("unlock_delay", {"kind": "zero"})),
            confirm_method=raw.get("confirm_method", "button"),
            confirm_delay=LatencyModel.from_dict(raw.get("confirm_delay", {"kind": "zero"})),
            biometric_failure_prob=float(raw.get("biometric_failure_prob", 0.0)),
            decision_policy=raw.get("decision_policy", "auto_confirm"),
            scripted_decisions=tuple(raw.get("scripted_decisions", ())),
        )

    @classmethod
    def from_file(cls, path: str | Path) -> AgentProfile:
        try:
            raw = json.loads(Path(path).read_text())
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"cannot read profile {path}: {exc}") from exc
        return cls.from_dict(raw)


def sample_attempt_delay(profile: AgentProfile, rng: random.Random) -> float:
    """Total human latency for one attempt, in ms.

    Unlock applies when the device rests locked. A failed biometric read
    costs one extra confirmation delay (single silent retry).
    """
    total = 0.0
    if profile.locked_at_rest:
        total += profile.unlock_delay.sample(rng)
    total += profile.confirm_delay.sample(rng)
    if (
        profile.confirm_method == "biometric"
        and profile.biometric_failure_prob > 0.0
        and rng.random() < profile.biometric_failure_prob
    ):
        total += profile.confirm_delay.sample(rng)
    return total
