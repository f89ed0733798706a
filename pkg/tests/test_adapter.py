"""PC adapter: prompt, verdict mapping, timing, CLI exit semantics."""

from __future__ import annotations

import io
import json
import re
import threading
import time

import pytest

from pushauth.adapter import AdapterConfig, Outcome, authenticate
from pushauth.adapter import cli as adapter_cli
from pushauth.agent import AgentProfile, AgentRunner
from pushauth.errors import ConfigError
from pushauth.protocol.model import DeviceClass


@pytest.fixture
def agent_env(live_server, tmp_path):
    """A live service with one zero-latency device agent attached."""

    def start(decision_policy="auto_confirm", user_id="user-1"):
        profile = AgentProfile(
            user_id=user_id,
            device_class=DeviceClass.WATCH,
            decision_policy=decision_policy,
        )
        runner = AgentRunner(
            profile,
            str(tmp_path / f"{user_id}.keys.json"),
            live_server.base_url,
            poll_max_wait_ms=250,
        )
        runner.enroll()
        thread = threading.Thread(target=runner.run, daemon=True)
        thread.start()
        return runner, thread

    started = []

    def factory(**kwargs):
        runner, thread = start(**kwargs)
        started.append((runner, thread))
        return runner

    yield factory
    for runner, thread in started:
        runner.stop()
        thread.join(timeout=2)


def adapter_config(live_server, **overrides) -> AdapterConfig:
    settings = {
        "service_url": live_server.base_url,
        "user_mapping": {"alice": "user-1"},
        "timeout_ms": 5_000,
    }
    settings.update(overrides)
    return AdapterConfig(**settings)


def test_prompt_template_must_contain_code_once():
    with pytest.raises(ConfigError):
        AdapterConfig(service_url="http://x", prompt_template="no placeholder")
    with pytest.raises(ConfigError):
        AdapterConfig(service_url="http://x", prompt_template="{code} and {code}")
    with pytest.raises(ConfigError):
        AdapterConfig(service_url="http://x", timeout_ms=0)


def test_success_on_loopback_is_fast(live_server, agent_env):
    agent_env()
    config = adapter_config(live_server)
    prompt = io.StringIO()
    outcome = authenticate("alice", config, prompt_out=prompt)
    assert outcome.outcome is Outcome.SUCCESS
    assert outcome.duration_ms < 250
    assert outcome.comparison_code in prompt.getvalue()


def test_denied_mapping(live_server, agent_env):
    agent_env(decision_policy="auto_deny")
    outcome = authenticate("alice", adapter_config(live_server), prompt_out=io.StringIO())
    assert outcome.outcome is Outcome.DENIED


def test_timeout_when_no_agent_running(live_server, agent_env):
    # Enroll a device so the request can be opened, then stop the agent
    # before it can answer.
    runner = agent_env()
    runner.stop()
    time.sleep(0.3)
    config = adapter_config(live_server, timeout_ms=1_000)
    begin = time.monotonic()
    outcome = authenticate("alice", config, prompt_out=io.StringIO())
    elapsed = time.monotonic() - begin
    assert outcome.outcome is Outcome.TIMEOUT
    assert 0.9 <= elapsed <= 1.5


def test_unmapped_user_is_error(live_server):
    outcome = authenticate("mallory", adapter_config(live_server), prompt_out=io.StringIO())
    assert outcome.outcome is Outcome.ERROR
    assert outcome.detail == "unmapped_user"


def test_unreachable_service_is_transport_error():
    config = AdapterConfig(
        service_url="http://127.0.0.1:1",
        user_mapping={"alice": "user-1"},
        timeout_ms=500,
    )
    outcome = authenticate("alice", config, prompt_out=io.StringIO())
    assert outcome.outcome is Outcome.ERROR
    assert outcome.detail == "transport"


def test_unknown_user_id_is_error(live_server):
    config = adapter_config(live_server, user_mapping={"alice": "user-unenrolled"})
    outcome = authenticate("alice", config, prompt_out=io.StringIO())
    assert outcome.outcome is Outcome.ERROR
    assert outcome.detail == "service_404"


def test_prompted_code_matches_delivered_code(live_server, tmp_path):
    """End-to-end equality of the code the PC prints and the device sees."""
    profile = AgentProfile(user_id="user-1", device_class=DeviceClass.PHONE)
    runner = AgentRunner(
        profile, str(tmp_path / "keys.json"), live_server.base_url, poll_max_wait_ms=250
    )
    runner.enroll()
    seen_codes = []
    original_handle = runner.handle

    def spy(item):
        seen_codes.append(item["comparison_code"])
        original_handle(item)

    runner.handle = spy
    thread = threading.Thread(target=runner.run, daemon=True)
    thread.start()
    try:
        prompt = io.StringIO()
        outcome = authenticate("alice", adapter_config(live_server), prompt_out=prompt)
        assert outcome.outcome is Outcome.SUCCESS
        assert len(seen_codes) == 1
        assert seen_codes[0] == outcome.comparison_code
        assert seen_codes[0] in prompt.getvalue()
    finally:
        runner.stop()
        thread.join(timeout=2)


def test_outcome_exit_status_total():
    statuses = {outcome: outcome for outcome in Outcome}
    mapped = {
        authenticate_outcome.exit_status
        for authenticate_outcome in (
            _outcome(Outcome.SUCCESS),
            _outcome(Outcome.DENIED),
            _outcome(Outcome.TIMEOUT),
            _outcome(Outcome.ERROR),
        )
    }
    assert mapped == {0, 1, 2, 3}
    assert len(statuses) == 4


def _outcome(kind: Outcome):
    from pushauth.adapter.auth import AuthOutcome

    return AuthOutcome(outcome=kind, duration_ms=1.0)


# -- CLI ------------------------------------------------------------------


def write_config(tmp_path, live_server, **overrides) -> str:
    doc = {
        "service_url": live_server.base_url,
        "user_mapping": {"alice": "user-1"},
        "timeout_ms": 5_000,
    }
    doc.update(overrides)
    path = tmp_path / "adapter.json"
    path.write_text(json.dumps(doc))
    return str(path)


def test_cli_success_exit_zero(live_server, agent_env, tmp_path, capsys):
    agent_env()
    status = adapter_cli.cli_main(
        ["--user", "alice", "--config", write_config(tmp_path, live_server)]
    )
    captured = capsys.readouterr()
    assert status == 0
    assert re.search(r"\b\d{3}\b", captured.out), "prompt with code on stdout"


def test_cli_denied_exit_one(live_server, agent_env, tmp_path):
    agent_env(decision_policy="auto_deny")
    status = adapter_cli.cli_main(
        ["--user", "alice", "--config", write_config(tmp_path, live_server)]
    )
    assert status == 1


def test_cli_timeout_exit_two(live_server, agent_env, tmp_path):
    runner = agent_env()
    runner.stop()
    time.sleep(0.3)
    status = adapter_cli.cli_main(
        [
            "--user",
            "alice",
            "--config",
            write_config(tmp_path, live_server),
            "--timeout-ms",
            "800",
        ]
    )
    assert status == 2


def test_cli_bad_flags_exit_three(capsys):
    assert adapter_cli.cli_main(["--nonsense"]) == 3
    captured = capsys.readouterr()
    assert "usage" in captured.err.lower()


def test_cli_missing_config_exit_three(tmp_path):
    assert adapter_cli.cli_main(["--user", "a", "--config", str(tmp_path / "nope.json")]) == 3


def test_cli_report_line_matches_library_measurement(
    live_server, agent_env, tmp_path, capsys, monkeypatch
):
    agent_env()
    recorded = {}
    real_authenticate = adapter_cli.authenticate

    def capture(*args, **kwargs):
        outcome = real_authenticate(*args, **kwargs)
        recorded["outcome"] = outcome
        return outcome

    monkeypatch.setattr(adapter_cli, "authenticate", capture)
    status = adapter_cli.cli_main(
        [
            "--user",
            "alice",
            "--config",
            write_config(tmp_path, live_server),
            "--report",
        ]
    )
    captured = capsys.readouterr()
    assert status == 0
    line = [l for l in captured.err.splitlines() if l.startswith("state=")][0]
    fields = dict(part.split("=", 1) for part in line.split())
    assert fields["state"] == "success"
    assert fields["request_id"] == recorded["outcome"].request_id
    assert abs(float(fields["duration_ms"]) - recorded["outcome"].duration_ms) <= 5.0
