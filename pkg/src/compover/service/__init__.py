"""HTTP service exposing the verifier. `app` is the ASGI application."""

from .app import app

__all__ = ["app"]
