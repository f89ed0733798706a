"""Service core: enrollment, request fan-out, long-poll delivery, verdicts.

Holds the device registry, the request store, and one FIFO of undelivered
request ids per device. Blocking reads (``poll_pending``, ``await_result``)
wait on condition variables and are woken by opens, settlements, and the
periodic expiry sweep, so no caller ever busy-waits.
"""

from __future__ import annotations

import threading
import time
from dataclasses import dataclass

from pushauth.errors import (
    MalformedInputError,
    UnknownDeviceError,
    UnknownRequestError,
    UnknownUserError,
)
from pushauth.protocol import (
    AuthRequest,
    DeviceClass,
    DeviceRecord,
    DeviceRegistry,
    EntropySource,
    RequestStore,
    SignedResponse,
    SystemEntropy,
    Verdict,
    create_auth_request,
)
from pushauth.protocol.keys import PUBLIC_KEY_LEN, _random_bytes
from pushauth.protocol.model import RequestState
from pushauth.service import persistence
from pushauth.service.config import ServiceConfig


def _epoch_ms() -> int:
    return time.time_ns() // 1_000_000


@dataclass(frozen=True)
class PendingDelivery:
    """One undelivered request as seen by a device."""

    request_id: str
    nonce: bytes
    comparison_code: str
    expires_at: int


@dataclass(frozen=True)
class ResultView:
    """State of a request as reported to the PC adapter."""

    state: RequestState
    settled_by: str | None = None


@dataclass
class ServiceStats:
    """Counters used by tests and the bench harness."""

    requests_opened: int = 0
    responses_submitted: int = 0
    devices_enrolled: int = 0
    polls_served: int = 0


class AuthService:
    """In-process service object; the HTTP layer is a thin shim over this."""

    def __init__(
        self,
        config: ServiceConfig | None = None,
        *,
        clock=None,
        entropy: EntropySource | None = None,
    ) -> None:
        self.config = config or ServiceConfig()
        self._clock = clock or _epoch_ms
        self._entropy = entropy or SystemEntropy()
        self.registry = DeviceRegistry()
        self.store = RequestStore()
        self.stats = ServiceStats()
        self._queue_lock = threading.RLock()
        self._queue_changed = threading.Condition(self._queue_lock)
        self._queues: dict[str, list[str]] = {}
        self._closed = False
        self._sweeper: threading.Thread | None = None
        self._sweep_stop = threading.Event()
        if self.config.persistence_path:
            persistence.restore_if_present(self, self.config.persistence_path)

    # -- enrollment ----------------------------------------------------

    def enroll_device(
        self,
        user_id: str,
        label: str,
        device_class: DeviceClass | str,
        public_key: bytes,
    ) -> DeviceRecord:
        """Register a device's public key. Idempotent per (user, key)."""
        if not user_id:
            raise MalformedInputError("user_id must be non-empty")
        if not label:
            raise MalformedInputError("label must be non-empty")
        try:
            device_class = DeviceClass(device_class)
        except ValueError:
            raise MalformedInputError(f"unknown device_class {device_class!r}")
        if not isinstance(public_key, (bytes, bytearray)) or len(public_key) != PUBLIC_KEY_LEN:
            raise MalformedInputError(f"public key must be {PUBLIC_KEY_LEN} bytes")
        public_key = bytes(public_key)

        existing = self.registry.find_by_key(user_id, public_key)
        if existing is not None:
            return existing
        record = DeviceRecord(
            device_id="dev-" + _random_bytes(self._entropy, 6).hex(),
            user_id=user_id,
            label=label,
            device_class=device_class,
            public_key=public_key,
            enrolled_at=self._clock(),
        )
        self.registry.add(record)
        self.stats.devices_enrolled += 1
        self._persist()
        return record

    # -- authentication requests ----------------------------------------

    def open_auth_request(self, user_id: str, ttl_ms: int | None = None) -> AuthRequest:
        """Create a request and enqueue it on every device of the user."""
        devices = self.registry.devices_for_user(user_id)
        if not devices:
            raise UnknownUserError(f"no enrolled devices for user {user_id!r}")
        ttl = self.config.default_ttl_ms if ttl_ms is None else ttl_ms
        if ttl <= 0:
            raise MalformedInputError(f"ttl_ms must be positive, got {ttl}")
        request = create_auth_request(user_id, self._entropy, self._clock(), ttl)
        self.store.add(request)
        with self._queue_changed:
            for device in devices:
                queue = self._queues.setdefault(device.device_id, [])
                if request.request_id not in queue:
                    queue.append(request.request_id)
            self._queue_changed.notify_all()
        self.stats.requests_opened += 1
        return request

    def poll_pending(self, device_id: str, max_wait_ms: int) -> list[PendingDelivery]:
        """Long-poll the device's queue.

        Returns immediately when deliverable requests exist, otherwise
        blocks up to min(max_wait_ms, long_poll_max_wait_ms). Settled and
        expired entries are pruned, never delivered.
        """
        if self.registry.get(device_id) is None:
            raise UnknownDeviceError(f"unknown device {device_id!r}")
        wait_ms = max(0, min(max_wait_ms, self.config.long_poll_max_wait_ms))
        deadline = time.monotonic() + wait_ms / 1000.0
        self.stats.polls_served += 1
        with self._queue_changed:
            while True:
                items = self._deliverable(device_id)
                if items or self._closed:
                    return items
                remaining = deadline - time.monotonic()
                if remaining <= 0:
                    return items
                self._queue_changed.wait(remaining)

    def _deliverable(self, device_id: str) -> list[PendingDelivery]:
        # Holds the queue lock; touches the store only through get().
        now = self._clock()
        queue = self._queues.get(device_id, [])
        keep: list[str] = []
        out: list[PendingDelivery] = []
        for request_id in queue:
            request = self.store.get(request_id)
            if request is None or request.is_terminal:
                continue
            if request.is_expired(now):
                continue
            keep.append(request_id)
            out.append(
                PendingDelivery(
                    request_id=request.request_id,
                    nonce=request.nonce,
                    comparison_code=request.comparison_code.render(),
                    expires_at=request.expires_at,
                )
            )
        self._queues[device_id] = keep
        return out

    def submit_response(self, response: SignedResponse) -> Verdict:
        """Verify and settle under the store's linearizable transition."""
        verdict = self.store.submit(self.registry, response, self._clock())
        self.stats.responses_submitted += 1
        with self._queue_changed:
            self._queue_changed.notify_all()
        if verdict.kind.value in ("confirmed", "denied"):
            self._persist()
        return verdict

    def await_result(self, request_id: str, max_wait_ms: int) -> ResultView:
        """Block until the request leaves pending or the wait budget ends.

        Never reports pending past the request's own expiry: the deadline
        is checked on every wake-up and the request expired on read.
        """
        request = self.store.get(request_id)
        if request is None:
            raise UnknownRequestError(f"unknown request {request_id!r}")
        wait_ms = max(0, min(max_wait_ms, self.config.long_poll_max_wait_ms))
        deadline = time.monotonic() + wait_ms / 1000.0
        while True:
            now = self._clock()
            if request.is_terminal:
                return ResultView(request.state, request.settled_by)
            if request.is_expired(now):
                self.store.expire_one(request_id, now)
                self._persist()
                return ResultView(request.state, request.settled_by)
            remaining = deadline - time.monotonic()
            time_to_expiry = (request.expires_at - now) / 1000.0
            if remaining <= 0 or self._closed:
                return ResultView(request.state, request.settled_by)
            self.store.wait_for_terminal(
                request_id, min(remaining, time_to_expiry) + 0.001
            )

    # -- expiry sweep -----------------------------------------------------

    def sweep_expired(self) -> list[str]:
        """One expiry pass; wakes pollers and result waiters on change."""
        expired = self.store.expire_pending(self._clock())
        if expired:
            with self._queue_changed:
                self._queue_changed.notify_all()
            self._persist()
        return expired

    def start_sweeper(self) -> None:
        if self._sweeper is not None:
            return
        self._sweep_stop.clear()

        def loop() -> None:
            interval = self.config.sweep_interval_ms / 1000.0
            while not self._sweep_stop.wait(interval):
                self.sweep_expired()

        self._sweeper = threading.Thread(target=loop, name="pushauth-sweep", daemon=True)
        self._sweeper.start()

    def stop_sweeper(self) -> None:
        if self._sweeper is None:
            return
        self._sweep_stop.set()
        self._sweeper.join()
        self._sweeper = None

    def close(self) -> None:
        """Stop the sweeper and release all blocked pollers and waiters."""
        self.stop_sweeper()
        self._closed = True
        with self._queue_changed:
            self._queue_changed.notify_all()
        self.store.notify_waiters()

    # -- persistence -----------------------------------------------------

    def snapshot_persistence(self, path: str) -> None:
        persistence.snapshot(self, path)

    def restore_persistence(self, path: str) -> None:
        persistence.restore(self, path)

    def _persist(self) -> None:
        if self.config.persistence_path:
            persistence.snapshot(self, self.config.persistence_path)
