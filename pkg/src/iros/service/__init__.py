"""Plan review HTTP service."""

from .app import create_app
from .sessions import STATES, TRANSITIONS, PlanSession, SessionStore

__all__ = ["create_app", "PlanSession", "SessionStore", "STATES", "TRANSITIONS"]
