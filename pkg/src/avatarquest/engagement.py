"""Persuasive messaging and self-monitoring reports.

Social-cue messages are canned templates with plain-text emoticon tokens:
congratulation on daily return, applause at milestones, encouragement after
wrong answers, and disappointment after a lapse of two or more days (the
only negative cue). Monitoring reports are folded straight from the event
log every time, never from cached counters, so they always agree with
replay.
"""

from __future__ import annotations

from dataclasses import dataclass
from datetime import date, timedelta
from enum import Enum
from typing import Iterable, Optional

from .config import GameConfig
from .eventlog import Event, EventKind
from .errors import UnknownPlayer
from .player import PlayerState, local_day

AVATAR_KIND_VALUES = {"avatar_recognition", "avatar_recall"}
MILESTONE_POINTS = 500


class CueTrigger(str, Enum):
    DAILY_RETURN = "daily_return"
    MILESTONE = "milestone"
    INCORRECT_ANSWER = "incorrect_answer"
    LAPSE = "lapse"


class Severity(str, Enum):
    POSITIVE = "positive"
    NEUTRAL = "neutral"
    NEGATIVE = "negative"


@dataclass(frozen=True)
class SocialCueMessage:
    trigger: CueTrigger
    text: str
    severity: Severity
    lapse_days: Optional[int] = None


# every template carries an emoticon token; none may ever mention an answer
TEMPLATES: dict[CueTrigger, list[tuple[str, Severity]]] = {
    CueTrigger.DAILY_RETURN: [
        ("Back again today, brilliant! :)", Severity.POSITIVE),
        ("Another day, another visit, love it :D", Severity.POSITIVE),
        ("You showed up again, that's the habit! ;)", Severity.POSITIVE),
    ],
    CueTrigger.MILESTONE: [
        ("Huge milestone unlocked, take a bow! \\o/", Severity.POSITIVE),
        ("That's a big one, bravo! :D", Severity.POSITIVE),
        ("Milestone reached, the crowd goes wild :)", Severity.POSITIVE),
    ],
    CueTrigger.INCORRECT_ANSWER: [
        ("Not this time, but you're close, keep at it :)", Severity.POSITIVE),
        ("Almost! Another look and you'll have it ;)", Severity.NEUTRAL),
        ("No worries, every miss teaches something :)", Severity.POSITIVE),
    ],
    CueTrigger.LAPSE: [
        ("We missed you around here... :(", Severity.NEGATIVE),
        ("The avatar has been waiting all alone :'(", Severity.NEGATIVE),
    ],
}


def social_cue(
    trigger: CueTrigger, state: PlayerState, lapse_days: Optional[int] = None
) -> SocialCueMessage:
    """Pick the template for this trigger; deterministic in (trigger, state).

    Rotation is keyed by the player's day-index (distinct days played) so
    the phrasing varies across days but never within one.
    """
    if trigger is CueTrigger.LAPSE and (lapse_days is None or lapse_days < 2):
        raise ValueError("lapse cues need lapse_days >= 2")
    templates = TEMPLATES[trigger]
    day_index = len(state.days_played)
    text, severity = templates[day_index % len(templates)]
    return SocialCueMessage(
        trigger=trigger,
        text=text,
        severity=severity,
        lapse_days=lapse_days if trigger is CueTrigger.LAPSE else None,
    )


@dataclass(frozen=True)
class MonitoringReport:
    period: str
    solved_avatar_correct: int
    solved_avatar_total: int
    score: int
    remaining_to_next_stage: int | str
    stage: str
    series: tuple[tuple[str, int], ...]

    def to_dict(self) -> dict:
        return {
            "period": self.period,
            "solved_avatar_correct": self.solved_avatar_correct,
            "solved_avatar_total": self.solved_avatar_total,
            "score": self.score,
            "remaining_to_next_stage": self.remaining_to_next_stage,
            "stage": self.stage,
            "series": [[bucket, count] for bucket, count in self.series],
        }


def _period_days(period: str, today: date) -> list[date]:
    if period == "day":
        return [today]
    if period == "week":
        monday = today - timedelta(days=today.weekday())
        return [monday + timedelta(days=i) for i in range(7)]
    if period == "month":
        first = today.replace(day=1)
        days = []
        cursor = first
        while cursor.month == first.month:
            days.append(cursor)
            cursor += timedelta(days=1)
        return days
    raise ValueError(f"period must be day, week, or month, got {period!r}")


def monitoring_report(
    events: Iterable[Event],
    player_id: str,
    period: str,
    now_ms: int,
    config: GameConfig,
) -> MonitoringReport:
    """Fold the event log into one report for the period containing ``now``.

    Counts avatar answers whose local calendar day falls inside the period;
    score and stage progress come from the whole history up to now.
    """
    player_events = [e for e in events if e.player_id == player_id and e.timestamp_ms <= now_ms]
    if not player_events:
        raise UnknownPlayer(player_id)

    tz = config.timezone
    for event in player_events:
        if event.kind == EventKind.PROFILE_CREATED.value:
            tz = event.payload.get("timezone", tz)
            break

    today = date.fromisoformat(local_day(now_ms, tz))
    bucket_days = _period_days(period, today)
    bucket_keys = [d.isoformat() for d in bucket_days]
    in_period = set(bucket_keys)

    solved_correct = 0
    solved_total = 0
    score = 0
    days_played: set[str] = set()
    recognition_window: list[bool] = []
    skilled_ever = False  # stage is monotone: a past skill streak keeps counting
    counts = {key: 0 for key in bucket_keys}

    for event in player_events:
        if event.kind == EventKind.ANSWER_JUDGED.value:
            payload = event.payload
            score += payload["delta"]
            day = local_day(event.timestamp_ms, tz)
            days_played.add(day)
            if payload["kind"] in AVATAR_KIND_VALUES:
                if payload["kind"] == "avatar_recognition":
                    recognition_window.append(bool(payload["correct"]))
                    window = recognition_window[-config.skill_window :]
                    if len(window) >= config.skill_window and (
                        sum(window) / len(window) >= config.skill_threshold
                    ):
                        skilled_ever = True
                if day in in_period:
                    solved_total += 1
                    if payload["correct"]:
                        solved_correct += 1
                if payload["correct"] and day in counts:
                    counts[day] += 1
        elif event.kind == EventKind.HINT_PURCHASED.value:
            score -= event.payload["cost"]

    late = len(days_played) >= config.days_threshold or skilled_ever
    remaining: int | str = "already_late" if late else config.days_threshold - len(days_played)

    return MonitoringReport(
        period=period,
        solved_avatar_correct=solved_correct,
        solved_avatar_total=solved_total,
        score=score,
        remaining_to_next_stage=remaining,
        stage="late" if late else "early",
        series=tuple((key, counts[key]) for key in bucket_keys),
    )
