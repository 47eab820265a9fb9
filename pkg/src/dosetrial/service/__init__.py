from .app import create_app
from .sessions import SessionStore, Session, SessionNotFound, RevisionConflict

__all__ = ["create_app", "SessionStore", "Session", "SessionNotFound", "RevisionConflict"]
