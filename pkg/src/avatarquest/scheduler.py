"""Session planning and nudges.

Each play session interleaves avatar rehearsal rounds among standard
puzzles at evenly spaced positions, never exceeding what is left of the
daily avatar quota. The recognition/recall mix follows the player's stage
(recognition-heavy early, recall-heavy late) with largest-remainder
rounding, and avatar fields are picked least-recently-rehearsed first.

Nudges: one reminder per 24 idle hours, and a hint offer for any challenge
stuck open for 24 hours, each deduplicated per 24-hour window.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Optional, Sequence

from .avatar import AvatarSchema
from .challenges import BankEntry, ChallengeKind, Verdict, letters_of
from .config import GameConfig
from .errors import UnknownSession
from .player import MS_PER_DAY, OpenChallenge, PlayerState
from .progression import Stage, apply_verdict, award_badges, refresh_stage
from .rng import SplitMix64, fnv1a64, mix64

STUCK_OPEN_MS = MS_PER_DAY
STUCK_FAILED_ATTEMPTS = 3
REMINDER_WINDOW_MS = MS_PER_DAY


class NotificationKind(str, Enum):
    REMINDER = "reminder"
    STUCK_HINT_OFFER = "stuck_hint_offer"


@dataclass(frozen=True)
class ChallengeDescriptor:
    kind: ChallengeKind
    seed: int
    challenge_id: str
    field_id: Optional[str] = None
    entry_id: Optional[str] = None


@dataclass(frozen=True)
class SessionPlan:
    session_id: str
    player_id: str
    created_ms: int
    items: tuple[ChallengeDescriptor, ...]
    avatar_count: int
    recognition_fraction: float


@dataclass(frozen=True)
class Notification:
    kind: NotificationKind
    player_id: str
    due_ms: int
    payload: str
    challenge_id: Optional[str] = None


def apportion_recognition(avatar_count: int, fraction: float) -> int:
    """Largest-remainder split of avatar items into recognition vs recall.

    Ties on the leftover seat go to recognition (the easier mode).
    """
    if avatar_count == 0:
        return 0
    rec_quota = fraction * avatar_count
    rcl_quota = (1.0 - fraction) * avatar_count
    rec = int(rec_quota)
    rcl = int(rcl_quota)
    remaining = avatar_count - rec - rcl
    if remaining:
        if rec_quota - rec >= rcl_quota - rcl:
            rec += remaining
        else:
            rcl += remaining
    return rec


def rehearsal_order(state: PlayerState, schema: AvatarSchema) -> list[str]:
    """Field ids, least recently rehearsed first; never-rehearsed fields lead.

    Ties (including the all-fresh case) break by schema order.
    """
    def key(pair):
        index, fid = pair
        ledger = state.rehearsal.get(fid)
        last = ledger.last_rehearsed_ms if ledger and ledger.last_rehearsed_ms is not None else -1
        return (last, index)

    indexed = list(enumerate(schema.field_ids()))
    indexed.sort(key=key)
    return [fid for _, fid in indexed]


def interleave_positions(total: int, avatar_count: int) -> list[int]:
    """Evenly spaced slot indices for the avatar items within the session."""
    return [(i * total) // avatar_count for i in range(avatar_count)]


def next_session_plan(
    state: PlayerState,
    schema: AvatarSchema,
    bank: Sequence[BankEntry],
    config: GameConfig,
    now_ms: int,
    seed: int,
) -> SessionPlan:
    """Plan one session: which rounds, in which modes, in which order.

    Deterministic in (state, schema, bank, config, now, seed). A plan with
    zero avatar items (daily quota already met) is valid and all-standard.
    """
    solved_today = state.solved_today(now_ms)
    avatar_count = max(0, min(config.session_length, config.daily_quota - solved_today))
    standard_count = config.session_length - avatar_count

    stage = Stage(state.stage)
    fraction = (
        config.early_recognition_fraction if stage is Stage.EARLY else config.late_recognition_fraction
    )
    recognition_count = apportion_recognition(avatar_count, fraction)

    stream = SplitMix64(mix64(seed, fnv1a64("session-plan"), fnv1a64(state.player_id)))

    order = rehearsal_order(state, schema)
    chosen_fields = [order[i % len(order)] for i in range(avatar_count)]
    modes = [ChallengeKind.AVATAR_RECOGNITION] * recognition_count + [
        ChallengeKind.AVATAR_RECALL
    ] * (avatar_count - recognition_count)
    stream.shuffle(modes)
    # recall needs the answer to fit the 12-letter pool; swap modes away from
    # oversized fields (mix counts are preserved whenever a swap exists)
    for i, (fid, mode) in enumerate(zip(chosen_fields, modes)):
        if mode is ChallengeKind.AVATAR_RECALL and _max_answer_letters(schema, fid) > 12:
            for j in range(len(modes)):
                if modes[j] is ChallengeKind.AVATAR_RECOGNITION and _max_answer_letters(
                    schema, chosen_fields[j]
                ) <= 12:
                    modes[i], modes[j] = modes[j], modes[i]
                    break
            else:
                modes[i] = ChallengeKind.AVATAR_RECOGNITION

    avatar_items = []
    for i, (fid, mode) in enumerate(zip(chosen_fields, modes)):
        item_seed = mix64(seed, fnv1a64(f"avatar:{i}:{fid}"))
        tag = "rcl" if mode is ChallengeKind.AVATAR_RECALL else "rcg"
        avatar_items.append(
            ChallengeDescriptor(
                kind=mode,
                seed=item_seed,
                challenge_id=f"av:{fid}:{tag}:{item_seed:016x}",
                field_id=fid,
            )
        )

    standard_items = []
    if standard_count:
        picks = stream.sample(list(bank), min(standard_count, len(bank)))
        while len(picks) < standard_count:
            picks.append(picks[len(picks) % len(bank)])
        for i, entry in enumerate(picks[:standard_count]):
            item_seed = mix64(seed, fnv1a64(f"standard:{i}:{entry.entry_id}"))
            standard_items.append(
                ChallengeDescriptor(
                    kind=ChallengeKind.STANDARD,
                    seed=item_seed,
                    challenge_id=f"std:{entry.entry_id}:{item_seed:016x}",
                    entry_id=entry.entry_id,
                )
            )

    total = len(avatar_items) + len(standard_items)
    slots: list[Optional[ChallengeDescriptor]] = [None] * total
    if avatar_items:
        for pos, item in zip(interleave_positions(total, len(avatar_items)), avatar_items):
            slots[pos] = item
    fill = iter(standard_items)
    for i in range(total):
        if slots[i] is None:
            slots[i] = next(fill)

    session_id = f"ses:{state.player_id}:{now_ms}:{mix64(seed, now_ms):016x}"
    return SessionPlan(
        session_id=session_id,
        player_id=state.player_id,
        created_ms=now_ms,
        items=tuple(slots),  # type: ignore[arg-type]
        avatar_count=avatar_count,
        recognition_fraction=fraction,
    )


def _max_answer_letters(schema: AvatarSchema, field_id: str) -> int:
    return max(len(letters_of(a)) for a in schema.field(field_id).answer_pool)


def is_stuck(open_challenge: OpenChallenge, now_ms: int) -> bool:
    """Stuck = three failed attempts, or open for 24 hours, whichever first."""
    if open_challenge.failed_attempts >= STUCK_FAILED_ATTEMPTS:
        return True
    return now_ms - open_challenge.issued_ms >= STUCK_OPEN_MS


def due_notifications(state: PlayerState, now_ms: int) -> list[Notification]:
    """Reminders and stuck-hint offers due right now, deduplicated per 24h."""
    out: list[Notification] = []
    anchor = state.last_played_ms if state.last_played_ms is not None else state.created_ms
    if now_ms - anchor >= REMINDER_WINDOW_MS and (
        state.last_reminder_ms is None or now_ms - state.last_reminder_ms >= REMINDER_WINDOW_MS
    ):
        out.append(
            Notification(
                kind=NotificationKind.REMINDER,
                player_id=state.player_id,
                due_ms=now_ms,
                payload="reminder.daily",
            )
        )
    for cid in sorted(state.open_challenges):
        oc = state.open_challenges[cid]
        if now_ms - oc.issued_ms < STUCK_OPEN_MS:
            continue
        if oc.last_offer_ms is not None and now_ms - oc.last_offer_ms < REMINDER_WINDOW_MS:
            continue
        out.append(
            Notification(
                kind=NotificationKind.STUCK_HINT_OFFER,
                player_id=state.player_id,
                due_ms=now_ms,
                payload="stuck.offer",
                challenge_id=cid,
            )
        )
    return out


def register_session(state: PlayerState, plan: SessionPlan) -> None:
    """Record an issued plan so answers and stuck checks can find its rounds."""
    state.issued_sessions[plan.session_id] = [item.challenge_id for item in plan.items]
    for item in plan.items:
        state.open_challenges[item.challenge_id] = OpenChallenge(
            challenge_id=item.challenge_id,
            kind=item.kind.value,
            seed=item.seed,
            issued_ms=plan.created_ms,
            session_id=plan.session_id,
            field_id=item.field_id,
            entry_id=item.entry_id,
        )


def record_session(
    state: PlayerState,
    session_id: str,
    outcomes: list[tuple[ChallengeDescriptor, Verdict]],
    now_ms: int,
    config: GameConfig,
) -> PlayerState:
    """Fold a completed session's verdicts into the player state.

    Outcomes are stamped in submission order (now, now+1ms, ...), matching
    what per-answer submission produces live; identical stamps would let the
    schema-order tie-break starve high-index fields. Idempotent per session
    id: replaying an already recorded session is a no-op. Raises
    UnknownSession for ids that were never issued.
    """
    if session_id not in state.issued_sessions:
        raise UnknownSession(session_id)
    if session_id in state.recorded_sessions:
        return state
    stamp = now_ms
    for i, (descriptor, verdict) in enumerate(outcomes):
        stamp = now_ms + i
        apply_verdict(
            state,
            descriptor.kind,
            verdict,
            stamp,
            challenge_id=descriptor.challenge_id,
            field_id=descriptor.field_id,
        )
        oc = state.open_challenges.get(descriptor.challenge_id)
        if oc is not None:
            if verdict.correct:
                state.open_challenges.pop(descriptor.challenge_id, None)
            else:
                oc.failed_attempts += 1
    award_badges(state, config.daily_quota, stamp)
    refresh_stage(state, config, stamp)
    state.last_played_ms = stamp
    state.recorded_sessions.add(session_id)
    return state
