"""Ed25519 key generation, signing, and verification.

Raw 32-byte public keys and seeds, 64-byte signatures. Verification is
deterministic: a (key, message, signature) triple either verifies or it
does not, with no external state involved.
"""

from __future__ import annotations

import secrets
from dataclasses import dataclass
from typing import Protocol, runtime_checkable

from cryptography.exceptions import InvalidSignature
from cryptography.hazmat.primitives.asymmetric.ed25519 import (
    Ed25519PrivateKey,
    Ed25519PublicKey,
)

from pushauth.errors import EntropyError, InvalidKeyError

PUBLIC_KEY_LEN = 32
PRIVATE_KEY_LEN = 32
SIGNATURE_LEN = 64


@runtime_checkable
class EntropySource(Protocol):
    """Anything that can produce n random bytes (``random.Random`` qualifies)."""

    def randbytes(self, n: int) -> bytes: ...


class SystemEntropy:
    """Cryptographic-quality entropy from the operating system."""

    def randbytes(self, n: int) -> bytes:
        return secrets.token_bytes(n)


@dataclass(frozen=True)
class KeyPair:
    """An Ed25519 key pair. ``private_key`` is the 32-byte seed and is secret."""

    public_key: bytes
    private_key: bytes


def _random_bytes(rng: EntropySource | None, n: int) -> bytes:
    source = rng if rng is not None else SystemEntropy()
    try:
        data = source.randbytes(n)
    except Exception as exc:
        raise EntropyError(f"entropy source failed: {exc}") from exc
    if not isinstance(data, (bytes, bytearray)) or len(data) != n:
        raise EntropyError(f"entropy source returned {len(data)} bytes, wanted {n}")
    return bytes(data)


def generate_keypair(rng: EntropySource | None = None) -> KeyPair:
    """Generate a fresh Ed25519 key pair from the given entropy source."""
    seed = _random_bytes(rng, PRIVATE_KEY_LEN)
    private = Ed25519PrivateKey.from_private_bytes(seed)
    public = private.public_key().public_bytes_raw()
    return KeyPair(public_key=public, private_key=seed)


def public_key_from_private(private_key: bytes) -> bytes:
    """Derive the public key deterministically from a private seed."""
    return _load_private(private_key).public_key().public_bytes_raw()


def _load_private(private_key: bytes) -> Ed25519PrivateKey:
    if not isinstance(private_key, (bytes, bytearray)) or len(private_key) != PRIVATE_KEY_LEN:
        raise InvalidKeyError(f"private key must be {PRIVATE_KEY_LEN} bytes")
    return Ed25519PrivateKey.from_private_bytes(bytes(private_key))


def sign(private_key: bytes, message: bytes) -> bytes:
    """Sign ``message``, returning the 64-byte signature."""
    return _load_private(private_key).sign(message)


def verify(public_key: bytes, message: bytes, signature: bytes) -> bool:
    """Check a signature. Malformed keys or signatures verify as False."""
    if not isinstance(public_key, (bytes, bytearray)) or len(public_key) != PUBLIC_KEY_LEN:
        return False
    if not isinstance(signature, (bytes, bytearray)) or len(signature) != SIGNATURE_LEN:
        return False
    try:
        Ed25519PublicKey.from_public_bytes(bytes(public_key)).verify(
            bytes(signature), message
        )
    except (InvalidSignature, ValueError):
        return False
    return True
