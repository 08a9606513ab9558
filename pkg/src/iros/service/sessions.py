"""File-backed review sessions over a solved plan.

One JSON file per group under ``<run>/sessions/``. Every mutation bumps
the revision and rewrites the file atomically, so a restarted service
resumes exactly where the reviewer left off. Edits made before a
re-optimization are kept for audit but marked absorbed: the re-solved
plan already contains them, so only later edits overlay it.
"""

from __future__ import annotations

import json
import os
import threading
from dataclasses import dataclass, field
from pathlib import Path

from ..errors import IoFailure

STATES = ("suggested", "edited", "validated_ok", "validated_infeasible", "confirmed")

# state -> states reachable by one request; re-validation loops in place
TRANSITIONS = {
    "suggested": {"edited", "validated_ok", "validated_infeasible"},
    "edited": {"edited", "validated_ok", "validated_infeasible"},
    "validated_ok": {"edited", "validated_ok", "validated_infeasible", "confirmed"},
    "validated_infeasible": {"edited", "validated_ok", "validated_infeasible"},
    "confirmed": set(),
}


@dataclass
class PlanSession:
    session_id: str
    group_id: str
    run_id: str
    state: str = "suggested"
    revision: int = 0
    edits: list[dict] = field(default_factory=list)
    absorbed: int = 0  # edits[:absorbed] are baked into plan_override
    plan_override: dict | None = None
    last_report: dict | None = None
    confirmed_order_ids: list[str] = field(default_factory=list)

    def live_edits(self) -> list[dict]:
        return self.edits[self.absorbed:]

    def advance(self, state: str) -> None:
        if state not in TRANSITIONS[self.state]:
            raise ValueError(f"no transition {self.state} -> {state}")
        self.state = state
        self.revision += 1

    def to_obj(self) -> dict:
        return {
            "session_id": self.session_id,
            "group_id": self.group_id,
            "run_id": self.run_id,
            "state": self.state,
            "revision": self.revision,
            "edits": self.edits,
            "absorbed": self.absorbed,
            "plan_override": self.plan_override,
            "last_report": self.last_report,
            "confirmed_order_ids": self.confirmed_order_ids,
        }

    @classmethod
    def from_obj(cls, obj: dict) -> "PlanSession":
        return cls(
            session_id=obj["session_id"],
            group_id=obj["group_id"],
            run_id=obj["run_id"],
            state=obj["state"],
            revision=obj["revision"],
            edits=list(obj["edits"]),
            absorbed=obj.get("absorbed", 0),
            plan_override=obj.get("plan_override"),
            last_report=obj.get("last_report"),
            confirmed_order_ids=list(obj.get("confirmed_order_ids", ())),
        )


class SessionStore:
    """Loads, creates, and atomically persists sessions for one run."""

    def __init__(self, run: Path):
        self.run = run
        self.directory = run / "sessions"
        self.lock = threading.Lock()

    def _path(self, group_id: str) -> Path:
        return self.directory / f"{group_id}.json"

    def load(self, group_id: str) -> PlanSession | None:
        path = self._path(group_id)
        if not path.is_file():
            return None
        return PlanSession.from_obj(json.loads(path.read_text(encoding="utf-8")))

    def get_or_create(self, group_id: str) -> PlanSession:
        session = self.load(group_id)
        if session is None:
            session = PlanSession(
                session_id=f"sess-{self.run.name}-{group_id}",
                group_id=group_id,
                run_id=self.run.name,
            )
            self.save(session)
        return session

    def save(self, session: PlanSession) -> None:
        self.directory.mkdir(parents=True, exist_ok=True)
        path = self._path(session.group_id)
        tmp = path.with_suffix(".json.tmp")
        try:
            tmp.write_text(json.dumps(session.to_obj(), sort_keys=True, indent=1) + "\n",
                           encoding="utf-8")
            os.replace(tmp, path)
        except OSError as exc:
            raise IoFailure(f"cannot persist session {path}: {exc}") from exc
