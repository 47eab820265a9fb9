"""Append-only trial sessions persisted as JSON-lines files.

Each session is one file: a `created` event followed by one
`outcomes_appended` event per cohort. State is rebuilt by replaying the file,
so the on-disk log is the source of truth and doubles as the audit trail.
"""

from __future__ import annotations

import threading
import uuid
from dataclasses import dataclass, field
from datetime import datetime, timezone
from pathlib import Path

from ..reports import canonical_json
import json


def _now() -> str:
    return datetime.now(timezone.utc).isoformat()


class SessionNotFound(KeyError):
    pass


class RevisionConflict(RuntimeError):
    def __init__(self, expected: int, got: int):
        self.expected = expected
        self.got = got
        super().__init__(f"stale revision {got}; session is at revision {expected}")


@dataclass
class Session:
    session_id: str
    design: str
    spec: dict
    policy: dict
    sampler: dict
    outcomes: list[str] = field(default_factory=list)
    latest: dict | None = None
    revision: int = 0
    created_at: str = field(default_factory=_now)
    updated_at: str = field(default_factory=_now)

    @property
    def history(self) -> str:
        return " ".join(tok for tok in self.outcomes if tok)


class SessionStore:
    """In-memory session index over a directory of JSONL event logs."""

    def __init__(self, persist_dir: str | Path | None = None):
        self.persist_dir = Path(persist_dir) if persist_dir else None
        if self.persist_dir:
            self.persist_dir.mkdir(parents=True, exist_ok=True)
        self._sessions: dict[str, Session] = {}
        self._locks: dict[str, threading.Lock] = {}
        self._registry_lock = threading.Lock()

    def _path(self, session_id: str) -> Path | None:
        if self.persist_dir is None:
            return None
        return self.persist_dir / f"{session_id}.jsonl"

    def lock(self, session_id: str) -> threading.Lock:
        with self._registry_lock:
            return self._locks.setdefault(session_id, threading.Lock())

    def create(self, design: str, spec: dict, policy: dict, sampler: dict) -> Session:
        session = Session(
            session_id=uuid.uuid4().hex,
            design=design,
            spec=spec,
            policy=policy,
            sampler=sampler,
        )
        self._sessions[session.session_id] = session
        self._append_event(
            session,
            {
                "event": "created",
                "session_id": session.session_id,
                "design": design,
                "spec": spec,
                "policy": policy,
                "sampler": sampler,
                "at": session.created_at,
            },
        )
        return session

    def get(self, session_id: str) -> Session:
        if session_id in self._sessions:
            return self._sessions[session_id]
        session = self._load(session_id)
        if session is None:
            raise SessionNotFound(session_id)
        self._sessions[session_id] = session
        return session

    def append_outcomes(self, session: Session, outcomes: str, revision: int,
                        latest: dict) -> Session:
        if revision != session.revision:
            raise RevisionConflict(session.revision, revision)
        session.outcomes.append(outcomes)
        session.revision += 1
        session.latest = latest
        session.updated_at = _now()
        self._append_event(
            session,
            {
                "event": "outcomes_appended",
                "outcomes": outcomes,
                "revision": session.revision,
                "latest": latest,
                "at": session.updated_at,
            },
        )
        return session

    def _append_event(self, session: Session, event: dict):
        path = self._path(session.session_id)
        if path is None:
            return
        with open(path, "a", encoding="utf-8") as fh:
            fh.write(canonical_json(event) + "\n")

    def _load(self, session_id: str) -> Session | None:
        path = self._path(session_id)
        if path is None or not path.exists():
            return None
        session = None
        with open(path, encoding="utf-8") as fh:
            for line in fh:
                event = json.loads(line)
                if event["event"] == "created":
                    session = Session(
                        session_id=event["session_id"],
                        design=event["design"],
                        spec=event["spec"],
                        policy=event["policy"],
                        sampler=event["sampler"],
                        created_at=event["at"],
                        updated_at=event["at"],
                    )
                elif event["event"] == "outcomes_appended" and session is not None:
                    session.outcomes.append(event["outcomes"])
                    session.revision = event["revision"]
                    session.latest = event["latest"]
                    session.updated_at = event["at"]
        return session
