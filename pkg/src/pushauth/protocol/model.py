"""Domain types and protocol operations.

An authentication attempt is one ``AuthRequest``: a fresh 32-byte nonce, a
3-digit comparison code for the human to cross-check, a deadline, and a
single-use state machine (pending -> confirmed | denied | expired). Devices
answer with a ``SignedResponse`` whose Ed25519 signature binds the request,
the responding device, and the confirm/deny decision together.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import TYPE_CHECKING

from pushauth.errors import MalformedInputError
from pushauth.protocol import keys
from pushauth.protocol.keys import EntropySource

if TYPE_CHECKING:
    from pushauth.protocol.store import DeviceRegistry

NONCE_LEN = 32


class DeviceClass(str, Enum):
    PHONE = "phone"
    WATCH = "watch"


class Decision(str, Enum):
    CONFIRM = "confirm"
    DENY = "deny"


class RequestState(str, Enum):
    PENDING = "pending"
    CONFIRMED = "confirmed"
    DENIED = "denied"
    EXPIRED = "expired"


TERMINAL_STATES = frozenset(
    {RequestState.CONFIRMED, RequestState.DENIED, RequestState.EXPIRED}
)


class VerdictKind(str, Enum):
    CONFIRMED = "confirmed"
    DENIED = "denied"
    REJECTED = "rejected"


class RejectReason(str, Enum):
    EXPIRED = "expired"
    ALREADY_SETTLED = "already_settled"
    UNKNOWN_DEVICE = "unknown_device"
    BAD_SIGNATURE = "bad_signature"


@dataclass(frozen=True)
class Verdict:
    """Outcome of verifying one response. ``reason`` is set iff rejected."""

    kind: VerdictKind
    reason: RejectReason | None = None

    @classmethod
    def confirmed(cls) -> Verdict:
        return cls(VerdictKind.CONFIRMED)

    @classmethod
    def denied(cls) -> Verdict:
        return cls(VerdictKind.DENIED)

    @classmethod
    def rejected(cls, reason: RejectReason) -> Verdict:
        return cls(VerdictKind.REJECTED, reason)


@dataclass(frozen=True)
class DeviceRecord:
    """An enrolled authenticator device."""

    device_id: str
    user_id: str
    label: str
    device_class: DeviceClass
    public_key: bytes
    enrolled_at: int

    def __post_init__(self) -> None:
        if len(self.public_key) != keys.PUBLIC_KEY_LEN:
            raise MalformedInputError(
                f"public key must be {keys.PUBLIC_KEY_LEN} bytes"
            )


@dataclass(frozen=True)
class ComparisonCode:
    """A 3-digit code shown on both the PC and the device. Display only."""

    value: int

    def __post_init__(self) -> None:
        if not 0 <= self.value <= 999:
            raise MalformedInputError(f"comparison code {self.value} out of [0, 999]")

    def render(self) -> str:
        """Always exactly 3 characters, zero-padded."""
        return f"{self.value:03d}"

    @classmethod
    def parse(cls, text: str) -> ComparisonCode:
        if len(text) != 3 or not text.isdigit():
            raise MalformedInputError(f"comparison code must be 3 digits, got {text!r}")
        return cls(int(text))


def random_comparison_code(rng: EntropySource | None = None) -> ComparisonCode:
    """Uniform code in [0, 999], by rejection sampling over two bytes."""
    while True:
        raw = int.from_bytes(keys._random_bytes(rng, 2), "big")
        # 65000 = largest multiple of 1000 below 2^16; rejecting above it
        # keeps the modulo exactly uniform.
        if raw < 65000:
            return ComparisonCode(raw % 1000)


@dataclass
class AuthRequest:
    """One authentication attempt. Terminal states are immutable."""

    request_id: str
    user_id: str
    nonce: bytes
    comparison_code: ComparisonCode
    created_at: int
    expires_at: int
    state: RequestState = RequestState.PENDING
    settled_by: str | None = None

    def __post_init__(self) -> None:
        if self.expires_at <= self.created_at:
            raise MalformedInputError("expires_at must be after created_at")
        if len(self.nonce) != NONCE_LEN:
            raise MalformedInputError(f"nonce must be {NONCE_LEN} bytes")

    @property
    def is_terminal(self) -> bool:
        return self.state in TERMINAL_STATES

    def is_expired(self, now: int) -> bool:
        return now >= self.expires_at

    def _transition(self, state: RequestState, settled_by: str | None = None) -> None:
        # Callers are responsible for serializing transitions (see RequestStore).
        if self.is_terminal:
            raise MalformedInputError(
                f"request {self.request_id} already {self.state.value}"
            )
        self.state = state
        self.settled_by = settled_by


@dataclass(frozen=True)
class SignedResponse:
    """A device's confirm/deny decision, bound to one request by a signature."""

    request_id: str
    device_id: str
    decision: Decision
    signature: bytes


def create_auth_request(
    user_id: str,
    rng: EntropySource | None,
    now: int,
    ttl_ms: int,
) -> AuthRequest:
    """Create a pending request with a fresh nonce and a uniform code."""
    if ttl_ms <= 0:
        raise MalformedInputError(f"ttl_ms must be positive, got {ttl_ms}")
    return AuthRequest(
        request_id="req-" + keys._random_bytes(rng, 8).hex(),
        user_id=user_id,
        nonce=keys._random_bytes(rng, NONCE_LEN),
        comparison_code=random_comparison_code(rng),
        created_at=now,
        expires_at=now + ttl_ms,
    )


def payload_bytes(
    request_id: str, nonce: bytes, device_id: str, decision: Decision
) -> bytes:
    """The canonical byte string that gets signed.

    Layout (normative, bit-exact):
    utf8(request_id) || 0x00 || nonce || 0x00 || utf8(device_id) || 0x00 ||
    one byte: 0x01 for confirm, 0x00 for deny.
    """
    tail = b"\x01" if decision is Decision.CONFIRM else b"\x00"
    return (
        request_id.encode("utf-8")
        + b"\x00"
        + nonce
        + b"\x00"
        + device_id.encode("utf-8")
        + b"\x00"
        + tail
    )


def canonical_payload(
    request: AuthRequest, device_id: str, decision: Decision
) -> bytes:
    """Canonical signing payload for a decision on ``request``."""
    return payload_bytes(request.request_id, request.nonce, device_id, decision)


def sign_decision(
    private_key: bytes,
    request: AuthRequest,
    device_id: str,
    decision: Decision,
) -> SignedResponse:
    """Sign a decision on ``request`` with the device's private key."""
    signature = keys.sign(private_key, canonical_payload(request, device_id, decision))
    return SignedResponse(
        request_id=request.request_id,
        device_id=device_id,
        decision=decision,
        signature=signature,
    )


def verify_response(
    registry: DeviceRegistry,
    request: AuthRequest,
    response: SignedResponse,
    now: int,
) -> Verdict:
    """Verify one response against one request and settle the request.

    Confirmed iff the request is still pending and unexpired, the device is
    enrolled for the request's user, and the signature is valid over the
    canonical payload with decision confirm. A valid signature with decision
    deny settles the request as denied. Everything else is rejected with a
    reason and leaves the request untouched.

    Not safe to call concurrently on one request; ``RequestStore.submit``
    serializes the transition.
    """
    if request.is_terminal:
        return Verdict.rejected(RejectReason.ALREADY_SETTLED)
    if request.is_expired(now):
        return Verdict.rejected(RejectReason.EXPIRED)
    if response.request_id != request.request_id:
        return Verdict.rejected(RejectReason.BAD_SIGNATURE)
    record = registry.get(response.device_id)
    if record is None or record.user_id != request.user_id:
        return Verdict.rejected(RejectReason.UNKNOWN_DEVICE)
    payload = canonical_payload(request, response.device_id, response.decision)
    if not keys.verify(record.public_key, payload, response.signature):
        return Verdict.rejected(RejectReason.BAD_SIGNATURE)
    if response.decision is Decision.CONFIRM:
        request._transition(RequestState.CONFIRMED, response.device_id)
        return Verdict.confirmed()
    request._transition(RequestState.DENIED, response.device_id)
    return Verdict.denied()
