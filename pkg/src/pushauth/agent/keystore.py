"""Local key storage for an agent.

A permission-restricted JSON file holds the private key alongside the
enrollment outcome. First start generates the key pair and registers the
public key with the service.
"""

from __future__ import annotations

import base64
import json
import os
import stat
from dataclasses import dataclass
from pathlib import Path

from pushauth.client import ServiceClient
from pushauth.errors import ConfigError
from pushauth.protocol.keys import EntropySource, KeyPair, generate_keypair


@dataclass(frozen=True)
class StoredIdentity:
    keys: KeyPair
    device_id: str
    user_id: str


def load_or_enroll(
    path: str | Path,
    client: ServiceClient,
    *,
    user_id: str,
    label: str,
    device_class: str,
    entropy: EntropySource | None = None,
) -> StoredIdentity:
    """Load the identity file, or generate keys and enroll on first start."""
    path = Path(path)
    if path.exists():
        return _load(path)
    keys = generate_keypair(entropy)
    record = client.enroll_device(user_id, label, device_class, keys.public_key)
    identity = StoredIdentity(keys=keys, device_id=record["device_id"], user_id=user_id)
    _write(path, identity)
    return identity


def _load(path: Path) -> StoredIdentity:
    try:
        raw = json.loads(path.read_text())
        keys = KeyPair(
            public_key=base64.b64decode(raw["public_key"]),
            private_key=base64.b64decode(raw["private_key"]),
        )
        return StoredIdentity(
            keys=keys, device_id=raw["device_id"], user_id=raw["user_id"]
        )
    except (OSError, json.JSONDecodeError, KeyError, ValueError) as exc:
        raise ConfigError(f"cannot read key store {path}: {exc}") from exc


def _write(path: Path, identity: StoredIdentity) -> None:
    doc = {
        "public_key": base64.b64encode(identity.keys.public_key).decode("ascii"),
        "private_key": base64.b64encode(identity.keys.private_key).decode("ascii"),
        "device_id": identity.device_id,
        "user_id": identity.user_id,
    }
    path.parent.mkdir(parents=True, exist_ok=True)
    fd = os.open(path, os.O_WRONLY | os.O_CREAT | os.O_TRUNC, stat.S_IRUSR | stat.S_IWUSR)
    with os.fdopen(fd, "w") as handle:
        json.dump(doc, handle, indent=2)
        handle.write("\n")
