"""Study execution.

Every device variant runs end to end: a real service instance, a real
agent signing real responses, and the PC adapter measuring trigger to
verdict. Attempts within a variant are strictly sequential. The password
baseline is a pure latency sample and never touches the network.

Timing modes:

- ``accounted`` (default): the recorded duration of an attempt is its
  seed-derived injected latency plus the plan's fixed overhead term, so
  reports are bit-identical across runs of the same plan and seed. Sleeps
  still happen (scaled by ``time_scale``) and the protocol runs for real;
  only the duration bookkeeping is deterministic.
- ``wall``: the recorded duration is the adapter's monotonic measurement,
  which includes true protocol overhead and clock jitter.
"""

from __future__ import annotations

import io
import random
import tempfile
import threading
import time
from dataclasses import dataclass

from pushauth.adapter.auth import Outcome, authenticate
from pushauth.adapter.config import AdapterConfig
from pushauth.agent.profile import sample_attempt_delay
from pushauth.agent.runner import AgentRunner, ScriptedStep
from pushauth.bench.plan import StudyPlan, VariantPlan
from pushauth.bench.report import RunSummary, VariantSummary, summarize_variant
from pushauth.client import ServiceClient
from pushauth.errors import StudyError
from pushauth.service.config import ServiceConfig
from pushauth.service.core import AuthService
from pushauth.service.http import ServiceServer

_OS_USER = "bench"
_AGENT_POLL_WAIT_MS = 500


def _epoch_ms() -> int:
    return time.time_ns() // 1_000_000


def _variant_rng(seed: int, variant_name: str) -> random.Random:
    return random.Random(f"{seed}:variant:{variant_name}")


def _failure_positions(rng: random.Random, n: int, prob: float) -> set[int]:
    """Seeded failure placement with an exact quota of round(prob * n)."""
    count = int(prob * n + 0.5)
    if count <= 0:
        return set()
    return set(rng.sample(range(n), min(count, n)))


@dataclass
class AttemptRecord:
    duration_ms: float
    wall_ms: float
    success: bool


class StudyRunner:
    """Runs one plan. Kept as an object so tests can reach the service."""

    def __init__(self, plan: StudyPlan):
        self.plan = plan
        self.service: AuthService | None = None
        self.server: ServiceServer | None = None

    def run(self) -> RunSummary:
        plan = self.plan
        order = list(plan.variants)
        if plan.shuffle:
            random.Random(f"{plan.seed}:order").shuffle(order)

        started_at = _epoch_ms()
        needs_service = any(not v.is_password for v in order)
        if needs_service:
            try:
                config = ServiceConfig(
                    listen_address="127.0.0.1:0",
                    default_ttl_ms=plan.ttl_ms,
                )
                self.service = AuthService(config)
                self.server = ServiceServer(self.service).start()
            except OSError as exc:
                raise StudyError(f"service startup failed: {exc}") from exc

        summaries: list[VariantSummary] = []
        incomplete = False
        error: str | None = None
        try:
            with tempfile.TemporaryDirectory(prefix="pushauth-bench-") as workdir:
                for variant in order:
                    try:
                        records = self._run_variant(variant, workdir)
                    except StudyError as exc:
                        incomplete = True
                        error = f"{variant.name}: {exc}"
                        break
                    summaries.append(
                        summarize_variant(
                            variant.name,
                            [r.duration_ms for r in records],
                            [r.success for r in records],
                            plan.successes_only,
                        )
                    )
        finally:
            if self.server is not None:
                self.server.stop()

        wall = plan.timing == "wall"
        return RunSummary(
            seed=plan.seed,
            config_digest=plan.digest(),
            timing=plan.timing,
            time_scale=plan.time_scale,
            successes_only=plan.successes_only,
            variants=tuple(summaries),
            incomplete=incomplete,
            error=error,
            started_at_ms=started_at if wall else None,
            finished_at_ms=_epoch_ms() if wall else None,
        )

    # -- variants ----------------------------------------------------------

    def _run_variant(self, variant: VariantPlan, workdir: str) -> list[AttemptRecord]:
        if variant.is_password:
            return self._run_password(variant)
        return self._run_device(variant, workdir)

    def _run_password(self, variant: VariantPlan) -> list[AttemptRecord]:
        plan = self.plan
        rng = _variant_rng(plan.seed, variant.name)
        n = variant.attempts
        delays = [variant.password_latency.sample(rng) for _ in range(n)]
        failures = _failure_positions(rng, n, variant.failure_prob)
        records = []
        for i in range(n):
            begin = time.monotonic()
            if delays[i] > 0:
                time.sleep(delays[i] * plan.time_scale / 1000.0)
            wall_ms = (time.monotonic() - begin) * 1000.0
            records.append(
                AttemptRecord(
                    duration_ms=self._recorded(delays[i], wall_ms, overhead=False),
                    wall_ms=wall_ms,
                    success=i not in failures,
                )
            )
        return records

    def _run_device(self, variant: VariantPlan, workdir: str) -> list[AttemptRecord]:
        plan = self.plan
        rng = _variant_rng(plan.seed, variant.name)
        profile = variant.agent_profile
        n = variant.attempts
        delays = [sample_attempt_delay(profile, rng) for _ in range(n)]
        failures = _failure_positions(rng, n, variant.failure_prob)
        schedule = [
            ScriptedStep("deny" if i in failures else "confirm", delay_ms=delays[i])
            for i in range(n)
        ]

        runner = AgentRunner(
            profile,
            f"{workdir}/{variant.name}.keys.json",
            self.server.base_url,
            time_scale=plan.time_scale,
            poll_max_wait_ms=_AGENT_POLL_WAIT_MS,
            schedule=schedule,
        )
        try:
            runner.enroll()
        except Exception as exc:
            raise StudyError(f"agent enrollment failed: {exc}") from exc
        agent_thread = threading.Thread(
            target=runner.run, name=f"bench-agent-{variant.name}", daemon=True
        )
        agent_thread.start()

        adapter_config = AdapterConfig(
            service_url=self.server.base_url,
            user_mapping={_OS_USER: profile.user_id},
            timeout_ms=plan.ttl_ms,
        )
        client = ServiceClient(self.server.base_url)
        records = []
        try:
            for i in range(n):
                outcome = authenticate(
                    _OS_USER, adapter_config, prompt_out=io.StringIO(), client=client
                )
                expected = i not in failures
                if outcome.outcome is Outcome.ERROR:
                    raise StudyError(f"attempt {i}: adapter error {outcome.detail}")
                got = outcome.outcome is Outcome.SUCCESS
                if got != expected:
                    raise StudyError(
                        f"attempt {i}: expected "
                        f"{'success' if expected else 'failure'}, got {outcome.outcome.value}"
                    )
                records.append(
                    AttemptRecord(
                        duration_ms=self._recorded(
                            delays[i], outcome.duration_ms, overhead=True
                        ),
                        wall_ms=outcome.duration_ms,
                        success=got,
                    )
                )
        finally:
            runner.stop()
            client.close()
            agent_thread.join(timeout=_AGENT_POLL_WAIT_MS / 1000.0 + 5.0)
        return records

    def _recorded(self, injected_ms: float, wall_ms: float, overhead: bool) -> float:
        if self.plan.timing == "wall":
            return wall_ms
        return injected_ms + (self.plan.overhead_ms if overhead else 0.0)


def run_study(plan: StudyPlan) -> RunSummary:
    """Execute a plan and return its summary."""
    return StudyRunner(plan).run()
