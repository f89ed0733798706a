"""HTTP front end for the service.

Endpoints (paths are part of the wire contract):

    POST /v1/devices
    POST /v1/auth-requests
    GET  /v1/devices/{id}/pending?max_wait_ms=N
    POST /v1/auth-requests/{id}/response
    GET  /v1/auth-requests/{id}/result?max_wait_ms=N

Bodies are JSON; byte strings (keys, nonces, signatures) travel base64;
timestamps are integer milliseconds since the epoch. Status mapping:
200/201 success, 404 unknown entity, 409 settled or rejected verdicts
(reason in the body), 422 malformed input.
"""

from __future__ import annotations

import base64
import json
import logging
import re
import threading
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer
from typing import Any
from urllib.parse import parse_qs, urlparse

from pushauth.errors import (
    MalformedInputError,
    UnknownDeviceError,
    UnknownRequestError,
    UnknownUserError,
)
from pushauth.protocol.model import Decision, SignedResponse, VerdictKind
from pushauth.service.config import ServiceConfig, host_port
from pushauth.service.core import AuthService

log = logging.getLogger(__name__)

_PENDING_RE = re.compile(r"^/v1/devices/([^/]+)/pending$")
_RESPONSE_RE = re.compile(r"^/v1/auth-requests/([^/]+)/response$")
_RESULT_RE = re.compile(r"^/v1/auth-requests/([^/]+)/result$")


class _JsonError(Exception):
    def __init__(self, status: int, body: dict[str, Any]):
        self.status = status
        self.body = body


def _b64decode(value: Any, name: str) -> bytes:
    if not isinstance(value, str):
        raise _JsonError(422, {"error": f"{name} must be a base64 string"})
    try:
        return base64.b64decode(value, validate=True)
    except (ValueError, TypeError):
        raise _JsonError(422, {"error": f"{name} is not valid base64"})


def _require(body: dict[str, Any], name: str) -> Any:
    if name not in body:
        raise _JsonError(422, {"error": f"missing field {name}"})
    return body[name]


class _Handler(BaseHTTPRequestHandler):
    protocol_version = "HTTP/1.1"
    server_version = "pushauth"

    # Set by make_server
    service: AuthService

    def log_message(self, format: str, *args: Any) -> None:
        log.debug("%s - %s", self.address_string(), format % args)

    # -- plumbing ------------------------------------------------------

    def _read_json(self) -> dict[str, Any]:
        length = int(self.headers.get("Content-Length", 0))
        raw = self.rfile.read(length) if length else b""
        if not raw:
            raise _JsonError(422, {"error": "empty body"})
        try:
            body = json.loads(raw)
        except json.JSONDecodeError:
            raise _JsonError(422, {"error": "body is not valid JSON"})
        if not isinstance(body, dict):
            raise _JsonError(422, {"error": "body must be a JSON object"})
        return body

    def _send_json(self, status: int, body: dict[str, Any]) -> None:
        data = json.dumps(body).encode("utf-8")
        self.send_response(status)
        self.send_header("Content-Type", "application/json")
        self.send_header("Content-Length", str(len(data)))
        self.end_headers()
        self.wfile.write(data)

    def _max_wait_ms(self, query: dict[str, list[str]]) -> int:
        values = query.get("max_wait_ms", ["0"])
        try:
            return int(values[0])
        except ValueError:
            raise _JsonError(422, {"error": "max_wait_ms must be an integer"})

    def _dispatch(self, method: str) -> None:
        url = urlparse(self.path)
        query = parse_qs(url.query)
        try:
            if method == "POST" and url.path == "/v1/devices":
                self._enroll()
            elif method == "POST" and url.path == "/v1/auth-requests":
                self._open_request()
            elif method == "GET" and (m := _PENDING_RE.match(url.path)):
                self._poll(m.group(1), self._max_wait_ms(query))
            elif method == "POST" and (m := _RESPONSE_RE.match(url.path)):
                self._submit(m.group(1))
            elif method == "GET" and (m := _RESULT_RE.match(url.path)):
                self._result(m.group(1), self._max_wait_ms(query))
            else:
                self._send_json(404, {"error": "no such endpoint"})
        except _JsonError as exc:
            self._send_json(exc.status, exc.body)
        except MalformedInputError as exc:
            self._send_json(422, {"error": str(exc)})
        except UnknownUserError:
            self._send_json(404, {"error": "unknown_user"})
        except UnknownDeviceError:
            self._send_json(404, {"error": "unknown_device"})
        except UnknownRequestError:
            self._send_json(404, {"error": "unknown_request"})
        except Exception:
            log.exception("unhandled error serving %s %s", method, self.path)
            self._send_json(500, {"error": "internal"})

    def do_POST(self) -> None:  # noqa: N802 (http.server API)
        self._dispatch("POST")

    def do_GET(self) -> None:  # noqa: N802
        self._dispatch("GET")

    # -- endpoints -----------------------------------------------------

    def _enroll(self) -> None:
        body = self._read_json()
        public_key = _b64decode(_require(body, "public_key"), "public_key")
        before = len(self.service.registry)
        record = self.service.enroll_device(
            user_id=_require(body, "user_id"),
            label=_require(body, "label"),
            device_class=_require(body, "device_class"),
            public_key=public_key,
        )
        created = len(self.service.registry) > before
        self._send_json(
            201 if created else 200,
            {
                "device_id": record.device_id,
                "user_id": record.user_id,
                "label": record.label,
                "device_class": record.device_class.value,
                "public_key": base64.b64encode(record.public_key).decode("ascii"),
                "enrolled_at": record.enrolled_at,
            },
        )

    def _open_request(self) -> None:
        body = self._read_json()
        ttl_ms = body.get("ttl_ms")
        if ttl_ms is not None and not isinstance(ttl_ms, int):
            raise _JsonError(422, {"error": "ttl_ms must be an integer"})
        request = self.service.open_auth_request(_require(body, "user_id"), ttl_ms)
        self._send_json(
            201,
            {
                "request_id": request.request_id,
                "comparison_code": request.comparison_code.render(),
                "created_at": request.created_at,
                "expires_at": request.expires_at,
            },
        )

    def _poll(self, device_id: str, max_wait_ms: int) -> None:
        items = self.service.poll_pending(device_id, max_wait_ms)
        self._send_json(
            200,
            {
                "requests": [
                    {
                        "request_id": item.request_id,
                        "nonce": base64.b64encode(item.nonce).decode("ascii"),
                        "comparison_code": item.comparison_code,
                        "expires_at": item.expires_at,
                    }
                    for item in items
                ]
            },
        )

    def _submit(self, request_id: str) -> None:
        body = self._read_json()
        decision_raw = _require(body, "decision")
        try:
            decision = Decision(decision_raw)
        except ValueError:
            raise _JsonError(422, {"error": f"unknown decision {decision_raw!r}"})
        response = SignedResponse(
            request_id=request_id,
            device_id=_require(body, "device_id"),
            decision=decision,
            signature=_b64decode(_require(body, "signature"), "signature"),
        )
        verdict = self.service.submit_response(response)
        if verdict.kind is VerdictKind.REJECTED:
            self._send_json(409, {"reason": verdict.reason.value})
            return
        request = self.service.store.get(request_id)
        self._send_json(
            200, {"state": request.state.value, "settled_by": request.settled_by}
        )

    def _result(self, request_id: str, max_wait_ms: int) -> None:
        view = self.service.await_result(request_id, max_wait_ms)
        body: dict[str, Any] = {"state": view.state.value}
        if view.settled_by is not None:
            body["settled_by"] = view.settled_by
        self._send_json(200, body)


def make_server(service: AuthService, listen_address: str | None = None) -> ThreadingHTTPServer:
    host, port = host_port(listen_address or service.config.listen_address)
    handler = type("BoundHandler", (_Handler,), {"service": service})
    server = ThreadingHTTPServer((host, port), handler)
    server.daemon_threads = True
    return server


class ServiceServer:
    """Owns a service, its HTTP listener, and the expiry sweeper."""

    def __init__(self, service: AuthService, listen_address: str | None = None):
        self.service = service
        self._server = make_server(service, listen_address)
        self._thread: threading.Thread | None = None

    @property
    def address(self) -> tuple[str, int]:
        return self._server.server_address[:2]

    @property
    def base_url(self) -> str:
        host, port = self.address
        return f"http://{host}:{port}"

    def start(self) -> ServiceServer:
        self.service.start_sweeper()
        self._thread = threading.Thread(
            target=self._server.serve_forever,
            kwargs={"poll_interval": 0.05},
            name="pushauth-http",
            daemon=True,
        )
        self._thread.start()
        return self

    def stop(self) -> None:
        self.service.close()
        self._server.shutdown()
        self._server.server_close()
        if self._thread is not None:
            self._thread.join(timeout=5)
            self._thread = None

    def __enter__(self) -> ServiceServer:
        return self.start()

    def __exit__(self, *exc_info: object) -> None:
        self.stop()


def run_forever(config: ServiceConfig) -> None:
    """Blocking entry point used by the CLI."""
    service = AuthService(config)
    server = ServiceServer(service)
    host, port = server.address
    log.info("listening on %s:%d", host, port)
    server.service.start_sweeper()
    try:
        server._server.serve_forever(poll_interval=0.2)
    except KeyboardInterrupt:
        pass
    finally:
        server.stop()
