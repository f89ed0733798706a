"""Pure protocol logic: keys, enrollment records, challenges, signing, verification.

Everything in this package is free of I/O. The request store provides the
linearizable state transitions that the networked service builds on.
"""

from pushauth.protocol.keys import (
    PUBLIC_KEY_LEN,
    PRIVATE_KEY_LEN,
    SIGNATURE_LEN,
    EntropySource,
    KeyPair,
    SystemEntropy,
    generate_keypair,
    public_key_from_private,
    sign,
    verify,
)
from pushauth.protocol.model import (
    AuthRequest,
    ComparisonCode,
    Decision,
    DeviceClass,
    DeviceRecord,
    RejectReason,
    RequestState,
    SignedResponse,
    Verdict,
    VerdictKind,
    canonical_payload,
    create_auth_request,
    payload_bytes,
    sign_decision,
    verify_response,
)
from pushauth.protocol.store import DeviceRegistry, RequestStore, expire_pending

__all__ = [
    "PUBLIC_KEY_LEN",
    "PRIVATE_KEY_LEN",
    "SIGNATURE_LEN",
    "EntropySource",
    "KeyPair",
    "SystemEntropy",
    "generate_keypair",
    "public_key_from_private",
    "sign",
    "verify",
    "AuthRequest",
    "ComparisonCode",
    "Decision",
    "DeviceClass",
    "DeviceRecord",
    "RejectReason",
    "RequestState",
    "SignedResponse",
    "Verdict",
    "VerdictKind",
    "canonical_payload",
    "create_auth_request",
    "payload_bytes",
    "sign_decision",
    "verify_response",
    "DeviceRegistry",
    "RequestStore",
    "expire_pending",
]
