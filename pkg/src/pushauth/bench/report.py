"""Run summaries and report emission.

The structured report is a stable JSON document: for a fixed plan and seed
in accounted timing it is bit-identical across runs. Wall timing adds real
clock metadata and real measured durations, which naturally jitter.
"""

from __future__ import annotations

import json
import statistics
import sys
from dataclasses import dataclass
from pathlib import Path
from typing import Any, IO

from pushauth.errors import ConfigError

SCHEMA_VERSION = 1


@dataclass(frozen=True)
class VariantSummary:
    name: str
    n: int
    successes: int
    failures: int
    success_rate: float
    mean_duration_s: float
    sd_duration_s: float

    def to_dict(self) -> dict[str, Any]:
        return {
            "name": self.name,
            "n": self.n,
            "successes": self.successes,
            "failures": self.failures,
            "success_rate": self.success_rate,
            "mean_duration_s": self.mean_duration_s,
            "sd_duration_s": self.sd_duration_s,
        }

    @classmethod
    def from_dict(cls, raw: dict[str, Any]) -> VariantSummary:
        return cls(
            name=raw["name"],
            n=int(raw["n"]),
            successes=int(raw["successes"]),
            failures=int(raw["failures"]),
            success_rate=float(raw["success_rate"]),
            mean_duration_s=float(raw["mean_duration_s"]),
            sd_duration_s=float(raw["sd_duration_s"]),
        )


def summarize_variant(
    name: str, durations_ms: list[float], successes: list[bool], successes_only: bool
) -> VariantSummary:
    """Aggregate one variant's attempts into the summary row."""
    n = len(durations_ms)
    won = sum(successes)
    pool = (
        [d for d, ok in zip(durations_ms, successes) if ok]
        if successes_only
        else list(durations_ms)
    )
    mean_s = (statistics.fmean(pool) / 1000.0) if pool else 0.0
    sd_s = (statistics.stdev(pool) / 1000.0) if len(pool) >= 2 else 0.0
    return VariantSummary(
        name=name,
        n=n,
        successes=won,
        failures=n - won,
        success_rate=(won / n) if n else 0.0,
        mean_duration_s=mean_s,
        sd_duration_s=sd_s,
    )


@dataclass(frozen=True)
class RunSummary:
    seed: int
    config_digest: str
    timing: str
    time_scale: float
    successes_only: bool
    variants: tuple[VariantSummary, ...] = ()
    incomplete: bool = False
    error: str | None = None
    started_at_ms: int | None = None
    finished_at_ms: int | None = None

    def to_dict(self) -> dict[str, Any]:
        doc: dict[str, Any] = {
            "schema_version": SCHEMA_VERSION,
            "seed": self.seed,
            "config_digest": self.config_digest,
            "timing": self.timing,
            "time_scale": self.time_scale,
            "successes_only": self.successes_only,
            "incomplete": self.incomplete,
            "variants": [v.to_dict() for v in self.variants],
        }
        if self.error is not None:
            doc["error"] = self.error
        if self.started_at_ms is not None:
            doc["started_at_ms"] = self.started_at_ms
            doc["finished_at_ms"] = self.finished_at_ms
        return doc

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True) + "\n"

    @classmethod
    def from_dict(cls, raw: dict[str, Any]) -> RunSummary:
        if raw.get("schema_version") != SCHEMA_VERSION:
            raise ConfigError(f"unsupported report version {raw.get('schema_version')!r}")
        return cls(
            seed=int(raw["seed"]),
            config_digest=raw["config_digest"],
            timing=raw["timing"],
            time_scale=float(raw["time_scale"]),
            successes_only=bool(raw["successes_only"]),
            variants=tuple(VariantSummary.from_dict(v) for v in raw["variants"]),
            incomplete=bool(raw.get("incomplete", False)),
            error=raw.get("error"),
            started_at_ms=raw.get("started_at_ms"),
            finished_at_ms=raw.get("finished_at_ms"),
        )


def parse_structured(text: str) -> RunSummary:
    try:
        return RunSummary.from_dict(json.loads(text))
    except (json.JSONDecodeError, KeyError, TypeError, ValueError) as exc:
        raise ConfigError(f"cannot parse structured report: {exc}") from exc


def text_table(summary: RunSummary) -> str:
    """Rows shaped like the published results table: variant, mean (sd), success."""
    header = f"{'Variant':<18} {'Duration':<18} {'Success':>8}"
    lines = [header, "-" * len(header)]
    for v in summary.variants:
        duration = f"{v.mean_duration_s:.2f} s ({v.sd_duration_s:.2f} s)"
        lines.append(f"{v.name:<18} {duration:<18} {v.success_rate * 100:>7.1f}%")
    if summary.incomplete:
        lines.append("(incomplete run)")
    return "\n".join(lines) + "\n"


def emit_report(
    summary: RunSummary,
    format: str = "text",
    out: str | Path | IO[str] | None = None,
) -> str:
    """Render the summary and write it to a path, stream, or stdout."""
    if format in ("text", "text_table"):
        rendered = text_table(summary)
    elif format in ("structured", "json"):
        rendered = summary.to_json()
    else:
        raise ConfigError(f"unknown report format {format!r}")
    if out is None:
        sys.stdout.write(rendered)
    elif isinstance(out, (str, Path)):
        Path(out).write_text(rendered)
    else:
        out.write(rendered)
    return rendered
