"""Headless simulated authenticator device."""

from pushauth.agent.profile import AgentProfile, LatencyModel, sample_attempt_delay
from pushauth.agent.runner import AgentRunner, ScriptedStep, run_agent, simulate_biometric_hold

__all__ = [
    "AgentProfile",
    "LatencyModel",
    "sample_attempt_delay",
    "AgentRunner",
    "ScriptedStep",
    "run_agent",
    "simulate_biometric_hold",
]
