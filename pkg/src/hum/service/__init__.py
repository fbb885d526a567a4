"""JSON session service: request/response commands plus a server-push event stream."""

from .app import create_app
from .manager import SessionManager

__all__ = ["create_app", "SessionManager"]
