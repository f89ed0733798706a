"""The blocking authentication call made by the PC.

One call spans trigger to verdict: it opens a request, announces the
comparison code on the conversation stream, then blocks until the service
reports a terminal state or the timeout budget runs out. Durations are
measured with a monotonic clock across that whole span.
"""

from __future__ import annotations

import sys
import time
from dataclasses import dataclass
from enum import Enum
from typing import IO

from pushauth.adapter.config import AdapterConfig
from pushauth.client import ServiceClient
from pushauth.errors import ServiceError, TransportError


class Outcome(str, Enum):
    SUCCESS = "success"
    DENIED = "denied"
    TIMEOUT = "timeout"
    ERROR = "error"


# A result long-poll is capped service-side; re-poll in slices until the
# adapter's own budget is spent.
_RESULT_SLICE_MS = 20_000


@dataclass(frozen=True)
class AuthOutcome:
    outcome: Outcome
    duration_ms: float
    detail: str | None = None
    request_id: str | None = None
    comparison_code: str | None = None

    @property
    def exit_status(self) -> int:
        return _EXIT_STATUS[self.outcome]


_EXIT_STATUS = {
    Outcome.SUCCESS: 0,
    Outcome.DENIED: 1,
    Outcome.TIMEOUT: 2,
    Outcome.ERROR: 3,
}


def authenticate(
    os_username: str,
    config: AdapterConfig,
    *,
    prompt_out: IO[str] | None = None,
    client: ServiceClient | None = None,
) -> AuthOutcome:
    """Run one authentication attempt for ``os_username``."""
    out = prompt_out if prompt_out is not None else sys.stdout
    started = time.monotonic()

    def done(
        outcome: Outcome,
        detail: str | None = None,
        request_id: str | None = None,
        code: str | None = None,
    ) -> AuthOutcome:
        return AuthOutcome(
            outcome=outcome,
            duration_ms=(time.monotonic() - started) * 1000.0,
            detail=detail,
            request_id=request_id,
            comparison_code=code,
        )

    user_id = config.user_mapping.get(os_username)
    if user_id is None:
        return done(Outcome.ERROR, "unmapped_user")

    owns_client = client is None
    client = client or ServiceClient(config.service_url)
    try:
        try:
            opened = client.open_auth_request(user_id, ttl_ms=config.timeout_ms)
        except TransportError:
            return done(Outcome.ERROR, "transport")
        except ServiceError as exc:
            return done(Outcome.ERROR, f"service_{exc.status}")

        request_id = opened["request_id"]
        code = opened["comparison_code"]
        out.write(config.prompt_template.format(code=code) + "\n")
        out.flush()

        deadline = started + config.timeout_ms / 1000.0
        while True:
            remaining_ms = int((deadline - time.monotonic()) * 1000)
            if remaining_ms <= 0:
                return done(Outcome.TIMEOUT, "budget_exhausted", request_id, code)
            try:
                result = client.await_result(
                    request_id, min(remaining_ms, _RESULT_SLICE_MS)
                )
            except TransportError:
                return done(Outcome.ERROR, "transport", request_id, code)
            except ServiceError as exc:
                return done(Outcome.ERROR, f"service_{exc.status}", request_id, code)
            state = result.get("state")
            if state == "confirmed":
                return done(Outcome.SUCCESS, None, request_id, code)
            if state == "denied":
                return done(Outcome.DENIED, None, request_id, code)
            if state == "expired":
                return done(Outcome.TIMEOUT, "expired", request_id, code)
            # still pending inside our budget: poll again
    finally:
        if owns_client:
            client.close()
