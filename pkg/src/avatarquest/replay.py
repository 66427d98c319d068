"""Event replay: PlayerState as a pure fold over the player's stream.

Every state change the service makes is first appended as an event and then
applied here, so rebuilding from the log (or from a snapshot plus the tail)
always lands on the identical state. Where an event carries a result the
production ops can recompute (score deltas, hint costs), the fold reruns
the op and cross-checks the payload, surfacing divergence as a corrupt log
rather than silently trusting it.
"""

from __future__ import annotations

from typing import Optional

from .challenges import ChallengeKind, HintKind, Verdict
from .config import GameConfig
from .errors import CorruptLog, UnknownPlayer
from .eventlog import Event, EventKind, EventLog
from .player import OpenChallenge, PlayerState, deserialize_state, serialize_state
from .progression import apply_verdict, purchase_hint, refresh_stage


def apply_event(state: Optional[PlayerState], event: Event, config: GameConfig) -> PlayerState:
    kind = event.kind
    payload = event.payload

    if kind == EventKind.PROFILE_CREATED.value:
        if state is not None:
            raise CorruptLog("ProfileCreated after other events")
        state = PlayerState(player_id=event.player_id)
        state.schema_id = payload["schema_id"]
        state.profile_seed = payload["seed"]
        state.timezone = payload.get("timezone", "UTC")
        state.created_ms = event.timestamp_ms
        return state

    if state is None:
        raise CorruptLog(f"{kind} before ProfileCreated")

    if kind == EventKind.SESSION_ISSUED.value:
        session_id = payload["session_id"]
        state.issued_sessions[session_id] = [item["challenge_id"] for item in payload["items"]]
        for item in payload["items"]:
            state.open_challenges[item["challenge_id"]] = OpenChallenge(
                challenge_id=item["challenge_id"],
                kind=item["kind"],
                seed=item["seed"],
                issued_ms=event.timestamp_ms,
                session_id=session_id,
                field_id=item.get("field_id"),
                entry_id=item.get("entry_id"),
            )
        return state

    if kind == EventKind.ANSWER_JUDGED.value:
        verdict = Verdict(
            correct=payload["correct"],
            kind=ChallengeKind(payload["kind"]),
            unspellable=payload.get("unspellable", False),
        )
        score = apply_verdict(
            state,
            ChallengeKind(payload["kind"]),
            verdict,
            event.timestamp_ms,
            challenge_id=payload["challenge_id"],
            field_id=payload.get("field_id"),
        )
        if score.delta != payload["delta"] or score.balance_after != payload["balance_after"]:
            raise CorruptLog(
                f"replayed score ({score.delta}, {score.balance_after}) disagrees with "
                f"recorded ({payload['delta']}, {payload['balance_after']})"
            )
        oc = state.open_challenges.get(payload["challenge_id"])
        if oc is not None:
            if verdict.correct:
                del state.open_challenges[payload["challenge_id"]]
            else:
                oc.failed_attempts += 1
        refresh_stage(state, config, event.timestamp_ms)
        return state

    if kind == EventKind.HINT_PURCHASED.value:
        grant = purchase_hint(
            state,
            payload["challenge_id"],
            event.timestamp_ms,
            HintKind(payload["kind"]),
        )
        if grant.cost != payload["cost"]:
            raise CorruptLog(f"replayed hint cost {grant.cost} != recorded {payload['cost']}")
        return state

    if kind == EventKind.BADGE_AWARDED.value:
        state.badges.append(
            {
                "kind": payload["badge"],
                "date": payload["date"],
                "awarded_at_ms": event.timestamp_ms,
            }
        )
        return state

    if kind == EventKind.NOTIFICATION_SENT.value:
        if payload["notification_kind"] == "reminder":
            state.last_reminder_ms = event.timestamp_ms
        else:
            oc = state.open_challenges.get(payload.get("challenge_id", ""))
            if oc is not None:
                oc.last_offer_ms = event.timestamp_ms
        return state

    if kind == EventKind.AUTH_ATTEMPTED.value:
        state.auth_attempts.append(
            {
                "timestamp_ms": event.timestamp_ms,
                "question_set": list(payload["question_set"]),
                "outcome": payload["outcome"],
            }
        )
        return state

    raise CorruptLog(f"unknown event kind {kind!r}")


def fold_events(events: list[Event], config: GameConfig, state: Optional[PlayerState] = None) -> PlayerState:
    for event in events:
        state = apply_event(state, event, config)
    if state is None:
        raise UnknownPlayer("no events to fold")
    return state


def load_state(
    log: EventLog,
    player_id: str,
    config: GameConfig,
    use_snapshot: bool = True,
) -> PlayerState:
    """Rebuild a player's state, starting from the latest snapshot when allowed."""
    if use_snapshot:
        snapshot = log.latest_snapshot(player_id)
        if snapshot is not None:
            state = deserialize_state(snapshot.state_json)
            tail = log.read_events(player_id, after_seq=snapshot.as_of_sequence)
            return fold_events(tail, config, state)
    return fold_events(log.read_events(player_id), config)


def snapshot_equivalent(log: EventLog, player_id: str, config: GameConfig) -> bool:
    """True when snapshot+tail replay matches full replay byte for byte."""
    full = serialize_state(load_state(log, player_id, config, use_snapshot=False))
    fast = serialize_state(load_state(log, player_id, config, use_snapshot=True))
    return full == fast
