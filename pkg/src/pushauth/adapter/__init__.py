"""PC-side authentication adapter: open a request, show the code, block for
the verdict, and map it to PAM-style exit semantics."""

from pushauth.adapter.auth import AuthOutcome, Outcome, authenticate
from pushauth.adapter.config import AdapterConfig

__all__ = ["AdapterConfig", "AuthOutcome", "Outcome", "authenticate"]
