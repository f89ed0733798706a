"""Shared fixtures: live service instances and acceptance reporting."""

from __future__ import annotations

import pytest

from pushauth.client import ServiceClient
from pushauth.service import AuthService, ServiceConfig, ServiceServer


@pytest.fixture
def service_factory():
    """Build live HTTP services on ephemeral ports; all stopped on teardown."""
    servers: list[ServiceServer] = []

    def make(**config_overrides) -> ServiceServer:
        settings = {"listen_address": "127.0.0.1:0"}
        settings.update(config_overrides)
        service = AuthService(ServiceConfig(**settings))
        server = ServiceServer(service).start()
        servers.append(server)
        return server

    yield make
    for server in servers:
        server.stop()


@pytest.fixture
def live_server(service_factory):
    return service_factory()


@pytest.fixture
def client(live_server):
    client = ServiceClient(live_server.base_url)
    yield client
    client.close()


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    """Print one PASS/FAIL line per acceptance criterion."""
    results: dict[str, str] = {}
    for status, outcome in (("failed", "FAIL"), ("error", "FAIL"), ("passed", "PASS")):
        for report in terminalreporter.stats.get(status, []):
            nodeid = getattr(report, "nodeid", "")
            if "test_acceptance" not in nodeid or "::" not in nodeid:
                continue
            if getattr(report, "when", "call") not in ("call", "setup"):
                continue
            results.setdefault(nodeid.split("::")[-1], outcome)
    if results:
        terminalreporter.write_sep("-", "acceptance criteria")
        for name, outcome in results.items():
            terminalreporter.write_line(f"{outcome}: {name}")
