"""HTTP client for the service wire protocol.

Used by the PC adapter, the headless agent, and the bench harness. Network
failures raise ``TransportError``; non-success statuses raise
``ServiceError`` with the decoded body attached.
"""

from __future__ import annotations

import base64
from typing import Any

import requests

from pushauth.errors import ServiceError, TransportError

# Extra read-timeout headroom on top of a long poll's own wait budget.
READ_MARGIN_S = 10.0


class ServiceClient:
    def __init__(self, base_url: str, session: requests.Session | None = None):
        self.base_url = base_url.rstrip("/")
        self._session = session or requests.Session()

    def close(self) -> None:
        self._session.close()

    def _request(
        self,
        method: str,
        path: str,
        *,
        json_body: dict[str, Any] | None = None,
        params: dict[str, Any] | None = None,
        timeout_s: float = READ_MARGIN_S,
    ) -> dict[str, Any]:
        try:
            response = self._session.request(
                method,
                self.base_url + path,
                json=json_body,
                params=params,
                timeout=timeout_s,
            )
        except requests.RequestException as exc:
            raise TransportError(f"{method} {path}: {exc}") from exc
        try:
            payload = response.json()
        except ValueError:
            payload = {"error": response.text}
        if response.status_code >= 400:
            raise ServiceError(response.status_code, payload)
        return payload

    def enroll_device(
        self, user_id: str, label: str, device_class: str, public_key: bytes
    ) -> dict[str, Any]:
        return self._request(
            "POST",
            "/v1/devices",
            json_body={
                "user_id": user_id,
                "label": label,
                "device_class": device_class,
                "public_key": base64.b64encode(public_key).decode("ascii"),
            },
        )

    def open_auth_request(
        self, user_id: str, ttl_ms: int | None = None
    ) -> dict[str, Any]:
        body: dict[str, Any] = {"user_id": user_id}
        if ttl_ms is not None:
            body["ttl_ms"] = ttl_ms
        return self._request("POST", "/v1/auth-requests", json_body=body)

    def poll_pending(self, device_id: str, max_wait_ms: int) -> list[dict[str, Any]]:
        payload = self._request(
            "GET",
            f"/v1/devices/{device_id}/pending",
            params={"max_wait_ms": max_wait_ms},
            timeout_s=max_wait_ms / 1000.0 + READ_MARGIN_S,
        )
        items = payload.get("requests", [])
        for item in items:
            item["nonce"] = base64.b64decode(item["nonce"])
        return items

    def submit_response(
        self, request_id: str, device_id: str, decision: str, signature: bytes
    ) -> dict[str, Any]:
        return self._request(
            "POST",
            f"/v1/auth-requests/{request_id}/response",
            json_body={
                "device_id": device_id,
                "decision": decision,
                "signature": base64.b64encode(signature).decode("ascii"),
            },
        )

    def await_result(self, request_id: str, max_wait_ms: int) -> dict[str, Any]:
        return self._request(
            "GET",
            f"/v1/auth-requests/{request_id}/result",
            params={"max_wait_ms": max_wait_ms},
            timeout_s=max_wait_ms / 1000.0 + READ_MARGIN_S,
        )
