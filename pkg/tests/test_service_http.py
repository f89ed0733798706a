"""Wire protocol: endpoints, status mapping, long polls over HTTP."""

from __future__ import annotations

import base64
import threading
import time

import pytest
import requests

from pushauth.client import ServiceClient
from pushauth.errors import ServiceError
from pushauth.protocol import generate_keypair
from pushauth.protocol import keys as K
from pushauth.protocol.model import Decision, payload_bytes
from pushauth.service.config import LISTEN_ENV_VAR, load_config


def enroll_http(client: ServiceClient, user_id="user-1", label="phone", device_class="phone"):
    pair = generate_keypair()
    record = client.enroll_device(user_id, label, device_class, pair.public_key)
    return record, pair


def sign_item(item, device_id, private_key, decision=Decision.CONFIRM):
    payload = payload_bytes(item["request_id"], item["nonce"], device_id, decision)
    return K.sign(private_key, payload)


def test_full_confirm_flow(client):
    record, pair = enroll_http(client)
    opened = client.open_auth_request("user-1")
    assert len(opened["comparison_code"]) == 3
    items = client.poll_pending(record["device_id"], 1_000)
    assert len(items) == 1
    item = items[0]
    assert item["comparison_code"] == opened["comparison_code"]
    signature = sign_item(item, record["device_id"], pair.private_key)
    settled = client.submit_response(
        item["request_id"], record["device_id"], "confirm", signature
    )
    assert settled == {"state": "confirmed", "settled_by": record["device_id"]}
    result = client.await_result(item["request_id"], 1_000)
    assert result["state"] == "confirmed"


def test_enroll_status_codes(live_server):
    pair = generate_keypair()
    body = {
        "user_id": "u",
        "label": "l",
        "device_class": "watch",
        "public_key": base64.b64encode(pair.public_key).decode(),
    }
    first = requests.post(f"{live_server.base_url}/v1/devices", json=body, timeout=5)
    assert first.status_code == 201
    second = requests.post(f"{live_server.base_url}/v1/devices", json=body, timeout=5)
    assert second.status_code == 200
    assert second.json()["device_id"] == first.json()["device_id"]


def test_unknown_entities_are_404(client, live_server):
    with pytest.raises(ServiceError) as err:
        client.open_auth_request("nobody")
    assert err.value.status == 404
    with pytest.raises(ServiceError) as err:
        client.poll_pending("dev-ghost", 0)
    assert err.value.status == 404
    with pytest.raises(ServiceError) as err:
        client.await_result("req-ghost", 0)
    assert err.value.status == 404
    with pytest.raises(ServiceError) as err:
        client.submit_response("req-ghost", "dev-ghost", "confirm", b"\x00" * 64)
    assert err.value.status == 404
    missing = requests.get(f"{live_server.base_url}/v1/nothing", timeout=5)
    assert missing.status_code == 404


@pytest.mark.parametrize(
    "body",
    [
        b"",
        b"not json",
        b"[1,2]",
        b'{"user_id": "u"}',  # missing fields
        b'{"user_id": "u", "label": "l", "device_class": "phone", "public_key": "@@"}',
    ],
)
def test_malformed_enrollment_is_422(live_server, body):
    response = requests.post(
        f"{live_server.base_url}/v1/devices",
        data=body,
        headers={"Content-Type": "application/json"},
        timeout=5,
    )
    assert response.status_code == 422


def test_bad_ttl_and_bad_decision_are_422(client, live_server):
    record, pair = enroll_http(client)
    response = requests.post(
        f"{live_server.base_url}/v1/auth-requests",
        json={"user_id": "user-1", "ttl_ms": "soon"},
        timeout=5,
    )
    assert response.status_code == 422
    response = requests.post(
        f"{live_server.base_url}/v1/auth-requests",
        json={"user_id": "user-1", "ttl_ms": -5},
        timeout=5,
    )
    assert response.status_code == 422

    opened = client.open_auth_request("user-1")
    response = requests.post(
        f"{live_server.base_url}/v1/auth-requests/{opened['request_id']}/response",
        json={"device_id": record["device_id"], "decision": "maybe", "signature": ""},
        timeout=5,
    )
    assert response.status_code == 422


def test_bad_max_wait_is_422(client, live_server):
    record, _ = enroll_http(client)
    response = requests.get(
        f"{live_server.base_url}/v1/devices/{record['device_id']}/pending",
        params={"max_wait_ms": "forever"},
        timeout=5,
    )
    assert response.status_code == 422


def test_duplicate_submit_is_409_with_reason(client):
    record, pair = enroll_http(client)
    opened = client.open_auth_request("user-1")
    item = client.poll_pending(record["device_id"], 1_000)[0]
    signature = sign_item(item, record["device_id"], pair.private_key)
    client.submit_response(item["request_id"], record["device_id"], "confirm", signature)
    with pytest.raises(ServiceError) as err:
        client.submit_response(
            item["request_id"], record["device_id"], "confirm", signature
        )
    assert err.value.status == 409
    assert err.value.payload["reason"] == "already_settled"


def test_bad_signature_is_409(client):
    record, _ = enroll_http(client)
    opened = client.open_auth_request("user-1")
    with pytest.raises(ServiceError) as err:
        client.submit_response(
            opened["request_id"], record["device_id"], "confirm", b"\x01" * 64
        )
    assert err.value.status == 409
    assert err.value.payload["reason"] == "bad_signature"


def test_open_during_blocked_poll_wakes_within_200ms(client, live_server):
    record, _ = enroll_http(client)
    poll_client = ServiceClient(live_server.base_url)
    returned = {}

    def poll():
        items = poll_client.poll_pending(record["device_id"], 5_000)
        returned["at"] = time.monotonic()
        returned["items"] = items

    thread = threading.Thread(target=poll)
    thread.start()
    time.sleep(0.15)
    opened_at = time.monotonic()
    client.open_auth_request("user-1")
    thread.join(timeout=5)
    poll_client.close()
    assert returned["items"], "poll should deliver the request"
    assert (returned["at"] - opened_at) * 1000 < 200


def test_expired_request_not_delivered_over_http(client):
    record, _ = enroll_http(client)
    client.open_auth_request("user-1", ttl_ms=10)
    time.sleep(0.05)
    assert client.poll_pending(record["device_id"], 0) == []


def test_two_devices_race_exactly_one_settles(client, live_server):
    record_a, pair_a = enroll_http(client, label="phone")
    record_b, pair_b = enroll_http(client, label="watch", device_class="watch")
    opened = client.open_auth_request("user-1")
    item_a = client.poll_pending(record_a["device_id"], 1_000)[0]
    item_b = client.poll_pending(record_b["device_id"], 1_000)[0]

    barrier = threading.Barrier(2)
    outcomes = {}

    def race(name, item, record, pair):
        racer = ServiceClient(live_server.base_url)
        signature = sign_item(item, record["device_id"], pair.private_key)
        barrier.wait()
        try:
            racer.submit_response(
                item["request_id"], record["device_id"], "confirm", signature
            )
            outcomes[name] = "settled"
        except ServiceError as err:
            outcomes[name] = err.payload["reason"]
        finally:
            racer.close()

    threads = [
        threading.Thread(target=race, args=("a", item_a, record_a, pair_a)),
        threading.Thread(target=race, args=("b", item_b, record_b, pair_b)),
    ]
    for t in threads:
        t.start()
    for t in threads:
        t.join()
    assert sorted(outcomes.values()) == ["already_settled", "settled"]


def test_listen_address_from_environment():
    config = load_config(None, env={LISTEN_ENV_VAR: "127.0.0.1:9123"})
    assert config.listen_address == "127.0.0.1:9123"
    config = load_config(
        None, env={LISTEN_ENV_VAR: "127.0.0.1:9123"}, listen_address="127.0.0.1:41"
    )
    assert config.listen_address == "127.0.0.1:41"
