"""The game economy.

Correct answers earn 10 points for standard puzzles, 15 for recognition
avatar rounds, and 20 for recall avatar rounds; wrong answers deduct the
same magnitude, floored so the balance never goes negative. Hints cost 30
points early and 50 once play reaches the late stage. Daily badges land at
one avatar solve (smiley), half the daily quota (cake), and the full quota
(trophy). The Early->Late transition is one-way: enough distinct days
played, or sustained recognition accuracy, whichever comes first.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from datetime import date, timedelta
from enum import Enum

from .challenges import ChallengeKind, HintKind
from .config import GameConfig
from .errors import DuplicateGrant, InsufficientPoints
from .player import PlayerState, FieldRehearsal, local_day


class Stage(str, Enum):
    EARLY = "early"
    LATE = "late"


class BadgeKind(str, Enum):
    SMILEY = "smiley"
    CAKE = "cake"
    TROPHY = "trophy"


REWARDS: dict[ChallengeKind, int] = {
    ChallengeKind.STANDARD: 10,
    ChallengeKind.AVATAR_RECOGNITION: 15,
    ChallengeKind.AVATAR_RECALL: 20,
}

HINT_COSTS: dict[Stage, int] = {
    Stage.EARLY: 30,
    Stage.LATE: 50,
}


@dataclass(frozen=True)
class ScoreEvent:
    challenge_id: str
    kind: ChallengeKind
    delta: int
    balance_after: int
    timestamp_ms: int


@dataclass(frozen=True)
class HintGrant:
    challenge_id: str
    cost: int
    granted_at_ms: int
    kind: HintKind


@dataclass(frozen=True)
class Badge:
    kind: BadgeKind
    date: str
    awarded_at_ms: int


def score_delta(balance: int, kind: ChallengeKind, correct: bool) -> int:
    """Signed point change for one verdict; deductions are clamped at zero balance."""
    magnitude = REWARDS[kind]
    if correct:
        return magnitude
    return -min(magnitude, balance)


def apply_verdict(
    state: PlayerState,
    kind: ChallengeKind,
    verdict,
    now_ms: int,
    challenge_id: str = "",
    field_id: str | None = None,
) -> ScoreEvent:
    """Score one judged answer and update the play ledgers in place.

    Every answer counts as play (last_played, distinct days, streak);
    correct avatar answers additionally bump the daily solve counter, and
    avatar fields record success/failure rehearsal stamps either way.
    """
    delta = score_delta(state.balance, kind, verdict.correct)
    state.balance += delta

    day = local_day(now_ms, state.timezone)
    if day not in state.days_played:
        yesterday = (date.fromisoformat(day) - timedelta(days=1)).isoformat()
        state.current_streak_days = (
            state.current_streak_days + 1 if yesterday in state.days_played else 1
        )
    state.last_played_ms = now_ms
    state.days_played.add(day)

    if kind in (ChallengeKind.AVATAR_RECOGNITION, ChallengeKind.AVATAR_RECALL):
        if field_id is not None:
            ledger = state.rehearsal.setdefault(field_id, FieldRehearsal())
            ledger.last_rehearsed_ms = now_ms
            if verdict.correct:
                ledger.successes += 1
                ledger.last_success_ms = now_ms
            else:
                ledger.failures += 1
        if verdict.correct:
            state.solved_by_day[day] = state.solved_by_day.get(day, 0) + 1
        if kind is ChallengeKind.AVATAR_RECOGNITION:
            state.recognition_history.append(verdict.correct)
            if len(state.recognition_history) > PlayerState.RECOGNITION_HISTORY_CAP:
                del state.recognition_history[: -PlayerState.RECOGNITION_HISTORY_CAP]

    return ScoreEvent(
        challenge_id=challenge_id,
        kind=kind,
        delta=delta,
        balance_after=state.balance,
        timestamp_ms=now_ms,
    )


def hint_cost(stage: str | Stage) -> int:
    return HINT_COSTS[Stage(stage)]


def check_hint_purchase(
    state: PlayerState, challenge_id: str, kind: HintKind = HintKind.VERBAL_CUES
) -> int:
    """Validate a purchase and return its cost without touching state."""
    cost = hint_cost(state.stage)
    if state.grant_key(challenge_id, kind.value) in state.hint_grants:
        raise DuplicateGrant(f"{kind.value} already granted for {challenge_id}")
    if state.balance < cost:
        raise InsufficientPoints(f"need {cost}, have {state.balance}")
    return cost


def purchase_hint(
    state: PlayerState,
    challenge_id: str,
    now_ms: int,
    kind: HintKind = HintKind.VERBAL_CUES,
) -> HintGrant:
    """Buy a hint at the stage's price; one grant per (challenge, kind)."""
    cost = check_hint_purchase(state, challenge_id, kind)
    state.balance -= cost
    grant = HintGrant(challenge_id=challenge_id, cost=cost, granted_at_ms=now_ms, kind=kind)
    state.hint_grants[state.grant_key(challenge_id, kind.value)] = {
        "challenge_id": challenge_id,
        "cost": cost,
        "granted_at_ms": now_ms,
        "kind": kind.value,
    }
    return grant


def badge_thresholds(daily_quota: int) -> dict[BadgeKind, int]:
    """Solve counts at which each badge lands; half of an odd quota rounds up."""
    return {
        BadgeKind.SMILEY: 1,
        BadgeKind.CAKE: math.ceil(daily_quota / 2),
        BadgeKind.TROPHY: daily_quota,
    }


def pending_badges(state: PlayerState, daily_quota: int, now_ms: int) -> list[Badge]:
    """Badges earned by today's solve count but not yet awarded today."""
    day = local_day(now_ms, state.timezone)
    solved = state.solved_by_day.get(day, 0)
    already = {b["kind"] for b in state.badges if b["date"] == day}
    earned = []
    for kind, needed in badge_thresholds(daily_quota).items():
        if solved >= needed and kind.value not in already:
            earned.append(Badge(kind=kind, date=day, awarded_at_ms=now_ms))
    return earned


def award_badges(state: PlayerState, daily_quota: int, now_ms: int) -> list[Badge]:
    """Record and return today's newly earned badges (at most once per day each)."""
    new = pending_badges(state, daily_quota, now_ms)
    for badge in new:
        state.badges.append(
            {"kind": badge.kind.value, "date": badge.date, "awarded_at_ms": badge.awarded_at_ms}
        )
    return new


def evaluate_stage(state: PlayerState, config: GameConfig, now_ms: int) -> Stage:
    """Early->Late, one way: enough distinct days, or windowed recognition skill."""
    if state.stage == Stage.LATE.value:
        return Stage.LATE
    if len(state.days_played) >= config.days_threshold:
        return Stage.LATE
    window = state.recognition_history[-config.skill_window :]
    if len(window) >= config.skill_window:
        accuracy = sum(window) / len(window)
        if accuracy >= config.skill_threshold:
            return Stage.LATE
    return Stage.EARLY


def refresh_stage(state: PlayerState, config: GameConfig, now_ms: int) -> Stage:
    stage = evaluate_stage(state, config, now_ms)
    state.stage = stage.value
    return stage
