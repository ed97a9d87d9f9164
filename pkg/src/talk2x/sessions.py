"""In-memory chat sessions and the append-only interaction log."""

from __future__ import annotations

import json
import secrets
import threading
from dataclasses import dataclass, field
from datetime import datetime, timezone
from pathlib import Path

from .agent import Message


def _utc_now() -> datetime:
    return datetime.now(timezone.utc)


def _iso_millis(moment: datetime) -> str:
    return moment.strftime("%Y-%m-%dT%H:%M:%S.") + f"{moment.microsecond // 1000:03d}Z"


@dataclass
class Session:
    """One user's conversation: id, creation time, raw message history."""

    id: str
    created_at: datetime = field(default_factory=_utc_now)
    messages: list[Message] = field(default_factory=list)
    last_active: datetime = field(default_factory=_utc_now)
    turn_lock: threading.Lock = field(default_factory=threading.Lock)


class SessionRegistry:
    """Server-lifetime session table with idle eviction."""

    def __init__(self, idle_timeout_minutes: int = 60):
        self.idle_timeout_minutes = idle_timeout_minutes
        self._sessions: dict[str, Session] = {}
        self._lock = threading.Lock()

    def create(self) -> Session:
        session = Session(id=secrets.token_urlsafe(16))
        with self._lock:
            self._evict_idle()
            self._sessions[session.id] = session
        return session

    def get(self, session_id: str) -> Session | None:
        with self._lock:
            self._evict_idle()
            session = self._sessions.get(session_id)
            if session is not None:
                session.last_active = _utc_now()
            return session

    def _evict_idle(self) -> None:
        cutoff = self.idle_timeout_minutes * 60
        now = _utc_now()
        stale = [
            sid
            for sid, session in self._sessions.items()
            if (now - session.last_active).total_seconds() > cutoff
        ]
        for sid in stale:
            del self._sessions[sid]

    def __len__(self) -> int:
        return len(self._sessions)


@dataclass
class LogEntry:
    timestamp: str  # UTC ISO-8601 with milliseconds
    session_id: str
    actor: str  # user | agent | tool
    payload: str


class InteractionLog:
    """Append-only JSON-lines log of every user, tool, and agent event."""

    def __init__(self, path: str | Path):
        self.path = Path(path)
        self._lock = threading.Lock()

    def append(self, session_id: str, actor: str, payload: str) -> LogEntry:
        entry = LogEntry(
            timestamp=_iso_millis(_utc_now()),
            session_id=session_id,
            actor=actor,
            payload=payload,
        )
        line = json.dumps(
            {
                "timestamp": entry.timestamp,
                "session_id": entry.session_id,
                "actor": entry.actor,
                "payload": entry.payload,
            },
            ensure_ascii=False,
        )
        with self._lock:
            self.path.parent.mkdir(parents=True, exist_ok=True)
            with open(self.path, "a", encoding="utf-8", newline="\n") as fh:
                fh.write(line + "\n")
        return entry

    def read_all(self) -> list[LogEntry]:
        if not self.path.exists():
            return []
        entries = []
        for line in self.path.read_text(encoding="utf-8").splitlines():
            if not line.strip():
                continue
            obj = json.loads(line)
            entries.append(LogEntry(**obj))
        return entries
