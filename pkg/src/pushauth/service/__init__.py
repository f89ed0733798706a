"""The networked authentication service: enrollment, delivery, verdicts."""

from pushauth.service.config import ServiceConfig
from pushauth.service.core import AuthService, PendingDelivery, ResultView
from pushauth.service.http import ServiceServer

__all__ = [
    "ServiceConfig",
    "AuthService",
    "PendingDelivery",
    "ResultView",
    "ServiceServer",
]
