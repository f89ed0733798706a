"""Request store and device registry with linearizable transitions.

The store owns every issued request and serializes settlement: under any
interleaving of submissions and expiry sweeps, a request leaves the pending
state at most once. Waiters block on the store's condition variable and are
woken on every transition.
"""

from __future__ import annotations

import threading

from pushauth.errors import DuplicateRequestError, UnknownRequestError
from pushauth.protocol.model import (
    AuthRequest,
    DeviceRecord,
    RequestState,
    SignedResponse,
    Verdict,
    verify_response,
)


class DeviceRegistry:
    """Enrolled devices, addressable by device id and by user."""

    def __init__(self) -> None:
        self._lock = threading.RLock()
        self._by_id: dict[str, DeviceRecord] = {}
        self._by_user: dict[str, list[str]] = {}

    def add(self, record: DeviceRecord) -> None:
        with self._lock:
            if record.device_id in self._by_id:
                raise DuplicateRequestError(f"device {record.device_id} already enrolled")
            self._by_id[record.device_id] = record
            self._by_user.setdefault(record.user_id, []).append(record.device_id)

    def get(self, device_id: str) -> DeviceRecord | None:
        with self._lock:
            return self._by_id.get(device_id)

    def devices_for_user(self, user_id: str) -> list[DeviceRecord]:
        with self._lock:
            return [self._by_id[d] for d in self._by_user.get(user_id, [])]

    def find_by_key(self, user_id: str, public_key: bytes) -> DeviceRecord | None:
        with self._lock:
            for device_id in self._by_user.get(user_id, []):
                record = self._by_id[device_id]
                if record.public_key == public_key:
                    return record
        return None

    def all_records(self) -> list[DeviceRecord]:
        with self._lock:
            return list(self._by_id.values())

    def __len__(self) -> int:
        with self._lock:
            return len(self._by_id)


class RequestStore:
    """All requests issued by one service instance.

    State transitions run under a single lock (compare-and-set on the
    pending state), making settlement linearizable. Nonce uniqueness across
    every request ever added is enforced here.
    """

    def __init__(self) -> None:
        self._lock = threading.RLock()
        self._changed = threading.Condition(self._lock)
        self._requests: dict[str, AuthRequest] = {}
        self._nonces: set[bytes] = set()

    def add(self, request: AuthRequest) -> None:
        with self._lock:
            if request.request_id in self._requests:
                raise DuplicateRequestError(f"request id {request.request_id} reused")
            if request.nonce in self._nonces:
                raise DuplicateRequestError("nonce reused")
            self._requests[request.request_id] = request
            self._nonces.add(request.nonce)

    def get(self, request_id: str) -> AuthRequest | None:
        with self._lock:
            return self._requests.get(request_id)

    def __len__(self) -> int:
        with self._lock:
            return len(self._requests)

    def submit(
        self,
        registry: DeviceRegistry,
        response: SignedResponse,
        now: int,
    ) -> Verdict:
        """Verify a response under the store lock and wake waiters."""
        with self._changed:
            request = self._requests.get(response.request_id)
            if request is None:
                raise UnknownRequestError(f"unknown request {response.request_id}")
            verdict = verify_response(registry, request, response, now)
            self._changed.notify_all()
            return verdict

    def expire_pending(self, now: int) -> list[str]:
        """Expire every pending request past its deadline; return their ids."""
        expired: list[str] = []
        with self._changed:
            for request in self._requests.values():
                if request.state is RequestState.PENDING and request.is_expired(now):
                    request._transition(RequestState.EXPIRED)
                    expired.append(request.request_id)
            if expired:
                self._changed.notify_all()
        return expired

    def terminal_requests(self) -> list[AuthRequest]:
        with self._lock:
            return [r for r in self._requests.values() if r.is_terminal]

    def expire_one(self, request_id: str, now: int) -> bool:
        """On-read expiry for a single request. True if it transitioned."""
        with self._changed:
            request = self._requests.get(request_id)
            if (
                request is not None
                and request.state is RequestState.PENDING
                and request.is_expired(now)
            ):
                request._transition(RequestState.EXPIRED)
                self._changed.notify_all()
                return True
        return False

    def wait_for_terminal(self, request_id: str, timeout_s: float) -> AuthRequest:
        """Block until the request leaves pending or the timeout elapses."""
        with self._changed:
            request = self._requests.get(request_id)
            if request is None:
                raise UnknownRequestError(f"unknown request {request_id}")
            self._changed.wait_for(lambda: request.is_terminal, timeout=timeout_s)
            return request

    def notify_waiters(self) -> None:
        with self._changed:
            self._changed.notify_all()


def expire_pending(store: RequestStore, now: int) -> list[str]:
    """Transition every overdue pending request in ``store`` to expired."""
    return store.expire_pending(now)
