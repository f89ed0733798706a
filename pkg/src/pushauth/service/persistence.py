"""Versioned JSON snapshots of the registry and terminal request log.

Pending requests are deliberately not persisted: they expire on restart.
A snapshot that cannot be parsed raises, and service startup refuses to
continue on a corrupt file rather than silently starting empty.
"""

from __future__ import annotations

import base64
import json
import os
from pathlib import Path
from typing import TYPE_CHECKING, Any

from pushauth.errors import PersistenceError
from pushauth.protocol.model import (
    AuthRequest,
    ComparisonCode,
    DeviceClass,
    DeviceRecord,
    RequestState,
)

if TYPE_CHECKING:
    from pushauth.service.core import AuthService

SCHEMA_VERSION = 1


def _device_to_dict(record: DeviceRecord) -> dict[str, Any]:
    return {
        "device_id": record.device_id,
        "user_id": record.user_id,
        "label": record.label,
        "device_class": record.device_class.value,
        "public_key": base64.b64encode(record.public_key).decode("ascii"),
        "enrolled_at": record.enrolled_at,
    }


def _device_from_dict(raw: dict[str, Any]) -> DeviceRecord:
    return DeviceRecord(
        device_id=raw["device_id"],
        user_id=raw["user_id"],
        label=raw["label"],
        device_class=DeviceClass(raw["device_class"]),
        public_key=base64.b64decode(raw["public_key"]),
        enrolled_at=int(raw["enrolled_at"]),
    )


def _request_to_dict(request: AuthRequest) -> dict[str, Any]:
    return {
        "request_id": request.request_id,
        "user_id": request.user_id,
        "nonce": base64.b64encode(request.nonce).decode("ascii"),
        "comparison_code": request.comparison_code.render(),
        "created_at": request.created_at,
        "expires_at": request.expires_at,
        "state": request.state.value,
        "settled_by": request.settled_by,
    }


def _request_from_dict(raw: dict[str, Any]) -> AuthRequest:
    request = AuthRequest(
        request_id=raw["request_id"],
        user_id=raw["user_id"],
        nonce=base64.b64decode(raw["nonce"]),
        comparison_code=ComparisonCode.parse(raw["comparison_code"]),
        created_at=int(raw["created_at"]),
        expires_at=int(raw["expires_at"]),
    )
    request.state = RequestState(raw["state"])
    request.settled_by = raw.get("settled_by")
    return request


def snapshot(service: AuthService, path: str | os.PathLike) -> None:
    """Write the registry and terminal request log atomically."""
    terminal = service.store.terminal_requests()
    doc = {
        "version": SCHEMA_VERSION,
        "devices": [_device_to_dict(r) for r in service.registry.all_records()],
        "settled_requests": [_request_to_dict(r) for r in terminal],
    }
    target = Path(path)
    tmp = target.with_suffix(target.suffix + ".tmp")
    try:
        tmp.write_text(json.dumps(doc, indent=2) + "\n")
        tmp.replace(target)
    except OSError as exc:
        raise PersistenceError(f"cannot write snapshot {target}: {exc}") from exc


def restore(service: AuthService, path: str | os.PathLike) -> None:
    """Load a snapshot into a fresh service. Corrupt files raise."""
    try:
        raw = json.loads(Path(path).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise PersistenceError(f"cannot read snapshot {path}: {exc}") from exc
    if not isinstance(raw, dict) or raw.get("version") != SCHEMA_VERSION:
        raise PersistenceError(
            f"snapshot {path} has unsupported version {raw.get('version') if isinstance(raw, dict) else None!r}"
        )
    try:
        devices = [_device_from_dict(d) for d in raw["devices"]]
        requests = [_request_from_dict(r) for r in raw["settled_requests"]]
    except (KeyError, TypeError, ValueError) as exc:
        raise PersistenceError(f"snapshot {path} is malformed: {exc}") from exc
    for record in devices:
        service.registry.add(record)
    for request in requests:
        # Terminal log entries re-register their nonces, keeping nonce
        # uniqueness intact across restarts.
        service.store.add(request)


def restore_if_present(service: AuthService, path: str | os.PathLike) -> None:
    if Path(path).exists():
        restore(service, path)
