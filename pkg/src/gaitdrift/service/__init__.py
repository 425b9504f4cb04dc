"""HTTP service wrapping the drift-detection workflows."""

from .app import app, create_app

__all__ = ["app", "create_app"]
