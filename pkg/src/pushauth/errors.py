"""Exception hierarchy shared across the package."""

from __future__ import annotations

from typing import Any


class PushAuthError(Exception):
    """Base class for all errors raised by this package."""


class EntropyError(PushAuthError):
    """The configured entropy source could not produce random bytes."""


class InvalidKeyError(PushAuthError):
    """A key is malformed (wrong length or not a valid Ed25519 key)."""


class DuplicateRequestError(PushAuthError):
    """A request id or nonce was reused within one service instance."""


class UnknownUserError(PushAuthError):
    """No enrolled devices exist for the given user."""


class UnknownDeviceError(PushAuthError):
    """The device id is not enrolled."""


class UnknownRequestError(PushAuthError):
    """The request id does not exist."""


class MalformedInputError(PushAuthError):
    """Caller-supplied input failed validation."""


class ConfigError(PushAuthError):
    """A configuration file or value is invalid."""


class PersistenceError(PushAuthError):
    """A persistence snapshot could not be read or parsed."""


class TransportError(PushAuthError):
    """The service could not be reached over the network."""


class ServiceError(PushAuthError):
    """The service answered with a non-success status."""

    def __init__(self, status: int, payload: Any = None):
        self.status = status
        self.payload = payload
        super().__init__(f"service returned {status}: {payload!r}")


class StudyError(PushAuthError):
    """A benchmark study could not be completed."""
