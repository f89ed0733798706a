"""Snapshot and restore of the registry and terminal request log."""

from __future__ import annotations

import json
import random

import pytest

from pushauth.errors import PersistenceError
from pushauth.protocol import generate_keypair
from pushauth.protocol.model import Decision, RequestState, sign_decision
from pushauth.service import AuthService, ServiceConfig


def make_service(**overrides) -> AuthService:
    settings = {"listen_address": "127.0.0.1:0"}
    settings.update(overrides)
    return AuthService(ServiceConfig(**settings))


def test_round_trip_identical_registry(tmp_path):
    source = make_service()
    pair = generate_keypair()
    source.enroll_device("user-1", "my phone", "phone", pair.public_key)
    path = tmp_path / "snap.json"
    source.snapshot_persistence(path)

    restored = make_service()
    restored.restore_persistence(path)
    assert restored.registry.all_records() == source.registry.all_records()


def test_empty_snapshot_restores_empty_registry(tmp_path):
    path = tmp_path / "empty.json"
    make_service().snapshot_persistence(path)
    restored = make_service()
    restored.restore_persistence(path)
    assert len(restored.registry) == 0


def test_hundred_random_devices_round_trip(tmp_path):
    """Field-by-field comparison oracle over 100 random records."""
    rng = random.Random(31)
    source = make_service()
    for i in range(100):
        pair = generate_keypair(rng)
        source.enroll_device(
            f"user-{rng.randrange(10)}",
            f"device {i}",
            rng.choice(["phone", "watch"]),
            pair.public_key,
        )
    path = tmp_path / "many.json"
    source.snapshot_persistence(path)
    restored = make_service()
    restored.restore_persistence(path)

    original = {r.device_id: r for r in source.registry.all_records()}
    loaded = {r.device_id: r for r in restored.registry.all_records()}
    assert original.keys() == loaded.keys()
    for device_id, record in original.items():
        other = loaded[device_id]
        for field in ("device_id", "user_id", "label", "device_class", "public_key", "enrolled_at"):
            assert getattr(record, field) == getattr(other, field), field


def test_terminal_requests_persist_but_pending_do_not(tmp_path):
    service = make_service()
    pair = generate_keypair()
    record = service.enroll_device("user-1", "phone", "phone", pair.public_key)
    settled = service.open_auth_request("user-1")
    service.submit_response(
        sign_decision(pair.private_key, settled, record.device_id, Decision.CONFIRM)
    )
    pending = service.open_auth_request("user-1")
    path = tmp_path / "log.json"
    service.snapshot_persistence(path)

    restored = make_service()
    restored.restore_persistence(path)
    kept = restored.store.get(settled.request_id)
    assert kept is not None and kept.state is RequestState.CONFIRMED
    assert restored.store.get(pending.request_id) is None


@pytest.mark.parametrize(
    "content",
    ["", "not json at all", "[]", '{"version": 99, "devices": [], "settled_requests": []}', '{"version": 1}'],
)
def test_corrupt_snapshot_raises(tmp_path, content):
    path = tmp_path / "bad.json"
    path.write_text(content)
    with pytest.raises(PersistenceError):
        make_service().restore_persistence(path)


def test_service_refuses_to_start_on_corrupt_snapshot(tmp_path):
    path = tmp_path / "bad.json"
    path.write_text("garbage")
    with pytest.raises(PersistenceError):
        AuthService(
            ServiceConfig(listen_address="127.0.0.1:0", persistence_path=str(path))
        )


def test_configured_service_persists_and_restores(tmp_path):
    path = tmp_path / "auto.json"
    first = AuthService(
        ServiceConfig(listen_address="127.0.0.1:0", persistence_path=str(path))
    )
    pair = generate_keypair()
    record = first.enroll_device("user-1", "phone", "phone", pair.public_key)
    assert path.exists()

    second = AuthService(
        ServiceConfig(listen_address="127.0.0.1:0", persistence_path=str(path))
    )
    assert [r.device_id for r in second.registry.all_records()] == [record.device_id]


def test_snapshot_is_versioned(tmp_path):
    service = make_service()
    path = tmp_path / "versioned.json"
    service.snapshot_persistence(path)
    assert json.loads(path.read_text())["version"] == 1
