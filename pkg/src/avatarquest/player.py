"""The per-player aggregate.

PlayerState is the single mutable record for one player: points, stage,
badges, per-field rehearsal ledger, daily counters, open challenges, and
notification bookkeeping. It is never persisted directly; it is rebuilt by
folding the player's event stream (see replay), and its canonical JSON form
is what snapshots store and what byte-for-byte replay comparisons use.

All timestamps are UTC epoch milliseconds. Calendar-day logic converts at
read time using the player's IANA timezone.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from datetime import datetime, timezone
from zoneinfo import ZoneInfo

MS_PER_HOUR = 3_600_000
MS_PER_DAY = 86_400_000


def local_day(ts_ms: int, tz_name: str) -> str:
    """ISO calendar date of a UTC millisecond timestamp in the given zone."""
    dt = datetime.fromtimestamp(ts_ms / 1000.0, tz=timezone.utc)
    return dt.astimezone(ZoneInfo(tz_name)).date().isoformat()


@dataclass
class FieldRehearsal:
    successes: int = 0
    failures: int = 0
    last_rehearsed_ms: int | None = None
    last_success_ms: int | None = None


@dataclass
class OpenChallenge:
    challenge_id: str
    kind: str
    seed: int
    issued_ms: int
    session_id: str
    field_id: str | None = None
    entry_id: str | None = None
    failed_attempts: int = 0
    last_offer_ms: int | None = None


@dataclass
class PlayerState:
    player_id: str
    schema_id: str = ""
    profile_seed: int = 0
    timezone: str = "UTC"
    created_ms: int = 0
    balance: int = 0
    stage: str = "early"
    last_played_ms: int | None = None
    last_reminder_ms: int | None = None
    current_streak_days: int = 0
    days_played: set[str] = field(default_factory=set)
    solved_by_day: dict[str, int] = field(default_factory=dict)
    recognition_history: list[bool] = field(default_factory=list)
    badges: list[dict] = field(default_factory=list)
    rehearsal: dict[str, FieldRehearsal] = field(default_factory=dict)
    open_challenges: dict[str, OpenChallenge] = field(default_factory=dict)
    hint_grants: dict[str, dict] = field(default_factory=dict)
    issued_sessions: dict[str, list[str]] = field(default_factory=dict)
    recorded_sessions: set[str] = field(default_factory=set)
    auth_attempts: list[dict] = field(default_factory=list)

    # keep only this many recognition outcomes; must stay >= any skill_window
    RECOGNITION_HISTORY_CAP = 200

    def solved_today(self, now_ms: int) -> int:
        return self.solved_by_day.get(local_day(now_ms, self.timezone), 0)

    def grant_key(self, challenge_id: str, hint_kind: str) -> str:
        return f"{challenge_id}#{hint_kind}"


def state_to_dict(state: PlayerState) -> dict:
    """JSON-safe dict with deterministic ordering of all collections."""
    return {
        "player_id": state.player_id,
        "schema_id": state.schema_id,
        "profile_seed": state.profile_seed,
        "timezone": state.timezone,
        "created_ms": state.created_ms,
        "balance": state.balance,
        "stage": state.stage,
        "last_played_ms": state.last_played_ms,
        "last_reminder_ms": state.last_reminder_ms,
        "current_streak_days": state.current_streak_days,
        "days_played": sorted(state.days_played),
        "solved_by_day": {day: state.solved_by_day[day] for day in sorted(state.solved_by_day)},
        "recognition_history": list(state.recognition_history),
        "badges": list(state.badges),
        "rehearsal": {
            fid: {
                "successes": r.successes,
                "failures": r.failures,
                "last_rehearsed_ms": r.last_rehearsed_ms,
                "last_success_ms": r.last_success_ms,
            }
            for fid, r in sorted(state.rehearsal.items())
        },
        "open_challenges": {
            cid: {
                "challenge_id": oc.challenge_id,
                "kind": oc.kind,
                "seed": oc.seed,
                "issued_ms": oc.issued_ms,
                "session_id": oc.session_id,
                "field_id": oc.field_id,
                "entry_id": oc.entry_id,
                "failed_attempts": oc.failed_attempts,
                "last_offer_ms": oc.last_offer_ms,
            }
            for cid, oc in sorted(state.open_challenges.items())
        },
        "hint_grants": {key: state.hint_grants[key] for key in sorted(state.hint_grants)},
        "issued_sessions": {sid: state.issued_sessions[sid] for sid in sorted(state.issued_sessions)},
        "recorded_sessions": sorted(state.recorded_sessions),
        "auth_attempts": list(state.auth_attempts),
    }


def state_from_dict(data: dict) -> PlayerState:
    state = PlayerState(player_id=data["player_id"])
    state.schema_id = data["schema_id"]
    state.profile_seed = data["profile_seed"]
    state.timezone = data["timezone"]
    state.created_ms = data["created_ms"]
    state.balance = data["balance"]
    state.stage = data["stage"]
    state.last_played_ms = data["last_played_ms"]
    state.last_reminder_ms = data["last_reminder_ms"]
    state.current_streak_days = data["current_streak_days"]
    state.days_played = set(data["days_played"])
    state.solved_by_day = dict(data["solved_by_day"])
    state.recognition_history = list(data["recognition_history"])
    state.badges = list(data["badges"])
    state.rehearsal = {
        fid: FieldRehearsal(**raw) for fid, raw in data["rehearsal"].items()
    }
    state.open_challenges = {
        cid: OpenChallenge(**raw) for cid, raw in data["open_challenges"].items()
    }
    state.hint_grants = dict(data["hint_grants"])
    state.issued_sessions = {sid: list(cids) for sid, cids in data["issued_sessions"].items()}
    state.recorded_sessions = set(data["recorded_sessions"])
    state.auth_attempts = list(data["auth_attempts"])
    return state


def serialize_state(state: PlayerState) -> str:
    """Canonical JSON text; equal states serialize to identical bytes."""
    return json.dumps(state_to_dict(state), sort_keys=True, separators=(",", ":"))


def deserialize_state(text: str) -> PlayerState:
    return state_from_dict(json.loads(text))
