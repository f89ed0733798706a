"""The agent loop: poll for requests, act like a person, sign, submit.

Each delivered request is answered at most once. The per-request delay is
either sampled from the profile's latency models or dictated by an
explicit schedule (the bench harness uses schedules so that it knows the
injected latency of every attempt). Sleeps honor a time-scale factor so
studies can run compressed.
"""

from __future__ import annotations

import random
import threading
import time
from dataclasses import dataclass

from pushauth.agent.keystore import StoredIdentity, load_or_enroll
from pushauth.agent.profile import AgentProfile, sample_attempt_delay
from pushauth.client import ServiceClient
from pushauth.errors import ServiceError, TransportError
from pushauth.protocol import keys
from pushauth.protocol.model import Decision, payload_bytes

BACKOFF_INITIAL_S = 0.25
BACKOFF_CAP_S = 5.0

HOLD_CONFIRM_THRESHOLD_MS = 400.0


def simulate_biometric_hold(hold_ms: float) -> str:
    """Mocked fingerprint control: a hold of at least 400 ms confirms."""
    if hold_ms < 0:
        raise ValueError("hold_ms must be >= 0")
    return "confirm" if hold_ms >= HOLD_CONFIRM_THRESHOLD_MS else "fail"


@dataclass(frozen=True)
class ScriptedStep:
    """One pre-planned answer: what to decide and how long to take."""

    decision: str
    delay_ms: float | None = None


class AgentRunner:
    def __init__(
        self,
        profile: AgentProfile,
        key_store_path: str,
        service_url: str,
        *,
        seed: int | None = None,
        time_scale: float = 1.0,
        poll_max_wait_ms: int = 2_000,
        schedule: list[ScriptedStep] | None = None,
        client: ServiceClient | None = None,
        stop_event: threading.Event | None = None,
    ) -> None:
        self.profile = profile
        self.key_store_path = key_store_path
        self.service_url = service_url
        self.time_scale = time_scale
        self.poll_max_wait_ms = poll_max_wait_ms
        self.schedule = list(schedule) if schedule else None
        self._rng = random.Random(seed)
        self._client = client or ServiceClient(service_url)
        self.stop_event = stop_event or threading.Event()
        self.answered: set[str] = set()
        self.identity: StoredIdentity | None = None
        self._step_index = 0
        self._scripted_fallback = list(profile.scripted_decisions)
        self._assigned_steps: dict[str, ScriptedStep] = {}
        self._already_waited: set[str] = set()

    # -- lifecycle -------------------------------------------------------

    def enroll(self) -> StoredIdentity:
        self.identity = load_or_enroll(
            self.key_store_path,
            self._client,
            user_id=self.profile.user_id,
            label=self.profile.label,
            device_class=self.profile.device_class.value,
        )
        return self.identity

    def stop(self) -> None:
        self.stop_event.set()

    def run(self) -> None:
        """Poll and answer until stopped. Transport loss backs off, capped."""
        backoff = BACKOFF_INITIAL_S
        if self.identity is None:
            while not self.stop_event.is_set():
                try:
                    self.enroll()
                    break
                except TransportError:
                    if self.stop_event.wait(backoff):
                        return
                    backoff = min(backoff * 2, BACKOFF_CAP_S)
        backoff = BACKOFF_INITIAL_S
        while not self.stop_event.is_set():
            try:
                items = self._client.poll_pending(
                    self.identity.device_id, self.poll_max_wait_ms
                )
                backoff = BACKOFF_INITIAL_S
            except TransportError:
                if self.stop_event.wait(backoff):
                    return
                backoff = min(backoff * 2, BACKOFF_CAP_S)
                continue
            for item in items:
                if self.stop_event.is_set():
                    return
                if item["request_id"] not in self.answered:
                    self.handle(item)

    # -- one request -----------------------------------------------------

    def handle(self, item: dict) -> None:
        """Answer one delivered request: wait like a human, sign, submit."""
        request_id = item["request_id"]
        if request_id in self.answered:
            return
        step = self._assigned_steps.get(request_id)
        if step is None:
            step = self._next_step()
            self._assigned_steps[request_id] = step
        delay_ms = step.delay_ms
        if delay_ms is None:
            delay_ms = sample_attempt_delay(self.profile, self._rng)
            if self.profile.confirm_method == "biometric":
                self._run_biometric_gesture()
            # Pin the draw so a submit retry does not resample.
            self._assigned_steps[request_id] = ScriptedStep(step.decision, delay_ms)
        if delay_ms > 0 and request_id not in self._already_waited:
            self._already_waited.add(request_id)
            time.sleep(delay_ms * self.time_scale / 1000.0)
        decision = Decision(step.decision)
        payload = payload_bytes(
            request_id, item["nonce"], self.identity.device_id, decision
        )
        signature = keys.sign(self.identity.keys.private_key, payload)
        self.answered.add(request_id)
        try:
            self._client.submit_response(
                request_id, self.identity.device_id, decision.value, signature
            )
        except ServiceError:
            # Settled or expired under us; either way it is answered.
            pass
        except TransportError:
            # The queue still holds the request; allow a retry on the next
            # delivery without paying the human delay twice.
            self.answered.discard(request_id)

    def _next_step(self) -> ScriptedStep:
        if self.schedule is not None:
            if self._step_index < len(self.schedule):
                step = self.schedule[self._step_index]
                self._step_index += 1
                return step
            return ScriptedStep("confirm")
        policy = self.profile.decision_policy
        if policy == "auto_confirm":
            return ScriptedStep("confirm")
        if policy == "auto_deny":
            return ScriptedStep("deny")
        if self._scripted_fallback:
            return ScriptedStep(self._scripted_fallback.pop(0))
        return ScriptedStep("confirm")

    def _run_biometric_gesture(self) -> None:
        # A failed read is a hold under 400 ms; the silent retry always
        # holds long enough. The time cost of the retry is already part of
        # sample_attempt_delay.
        if self._rng.random() < self.profile.biometric_failure_prob:
            short_hold = self._rng.uniform(0.0, HOLD_CONFIRM_THRESHOLD_MS - 1.0)
            assert simulate_biometric_hold(short_hold) == "fail"
        assert simulate_biometric_hold(HOLD_CONFIRM_THRESHOLD_MS + 50.0) == "confirm"


def run_agent(
    profile: AgentProfile,
    key_store_path: str,
    service_url: str,
    **kwargs,
) -> AgentRunner:
    """Build a runner, enroll if needed, and loop until stopped."""
    runner = AgentRunner(profile, key_store_path, service_url, **kwargs)
    runner.run()
    return runner
