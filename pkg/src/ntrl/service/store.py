"""File-backed persistence: append-only JSON-lines for sessions and
submissions. Auditable with any text tool; writes are serialized."""

from __future__ import annotations

import json
import threading
import time
import uuid
from dataclasses import dataclass, field
from pathlib import Path


@dataclass
class SessionRecord:
    session_id: str
    party_templates: list[str]
    party_hp: list[int]
    hp_variation: bool
    created_at: float

    def as_dict(self) -> dict:
        return {
            "session_id": self.session_id,
            "party_templates": self.party_templates,
            "party_hp": self.party_hp,
            "hp_variation": self.hp_variation,
            "created_at": self.created_at,
        }


@dataclass
class Store:
    """Sessions and submissions under one data directory."""

    data_dir: Path
    _lock: threading.Lock = field(default_factory=threading.Lock)
    _sessions: dict[str, SessionRecord] = field(default_factory=dict)

    def __post_init__(self):
        self.data_dir = Path(self.data_dir)
        self.data_dir.mkdir(parents=True, exist_ok=True)
        sessions_file = self.data_dir / "sessions.jsonl"
        if sessions_file.exists():
            for line in sessions_file.read_text().splitlines():
                if line.strip():
                    d = json.loads(line)
                    self._sessions[d["session_id"]] = SessionRecord(**d)

    def create_session(self, party_templates: list[str], party_hp: list[int],
                       hp_variation: bool) -> SessionRecord:
        record = SessionRecord(
            session_id=uuid.uuid4().hex,
            party_templates=party_templates,
            party_hp=party_hp,
            hp_variation=hp_variation,
            created_at=time.time(),
        )
        with self._lock:
            self._sessions[record.session_id] = record
            with open(self.data_dir / "sessions.jsonl", "a", encoding="utf-8") as f:
                f.write(json.dumps(record.as_dict(), sort_keys=True) + "\n")
        return record

    def get_session(self, session_id: str) -> SessionRecord | None:
        return self._sessions.get(session_id)

    def append_submission(self, submission: dict) -> None:
        with self._lock:
            with open(self.data_dir / "submissions.jsonl", "a", encoding="utf-8") as f:
                f.write(json.dumps(submission, sort_keys=True) + "\n")

    def submissions(self) -> list[dict]:
        path = self.data_dir / "submissions.jsonl"
        if not path.exists():
            return []
        return [json.loads(line) for line in path.read_text().splitlines() if line.strip()]
