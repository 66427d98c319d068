"""Request/response schemas for the HTTP API.

Challenge views mirror the documented client serialization exactly: answers
are never present, and avatar rounds carry no answer_length.
"""

from __future__ import annotations

from typing import Optional

from pydantic import BaseModel, Field


class CreatePlayerRequest(BaseModel):
    seed: Optional[int] = Field(default=None, ge=0, lt=1 << 64)
    timezone: str = "UTC"


class CreatePlayerResponse(BaseModel):
    player_id: str
    schema_id: str
    profile_id: str


class ChallengeView(BaseModel):
    challenge_id: str
    kind: str
    image_refs: list[str]
    letter_pool: Optional[list[str]] = None
    options: Optional[list[str]] = None
    answer_length: Optional[int] = None
    cues: Optional[list[str]] = None


class SessionResponse(BaseModel):
    session_id: str
    created_ms: int
    avatar_count: int
    recognition_fraction: float
    items: list[ChallengeView]


class AnswerRequest(BaseModel):
    submission: str


class ScoreEventModel(BaseModel):
    challenge_id: str
    kind: str
    delta: int
    balance_after: int
    timestamp_ms: int


class BadgeModel(BaseModel):
    kind: str
    date: str


class SocialCueModel(BaseModel):
    trigger: str
    text: str
    severity: str
    lapse_days: Optional[int] = None


class AnswerResponse(BaseModel):
    correct: bool
    unspellable: bool
    kind: str
    score: ScoreEventModel
    new_badges: list[BadgeModel]
    social_cue: Optional[SocialCueModel] = None
    stage: str


class HintResponse(BaseModel):
    challenge_id: str
    kind: str
    cost: int
    balance_after: int
    cues: list[str]


class ReportResponse(BaseModel):
    period: str
    solved_avatar_correct: int
    solved_avatar_total: int
    score: int
    remaining_to_next_stage: int | str
    stage: str
    series: list[tuple[str, int]]


class NotificationModel(BaseModel):
    kind: str
    player_id: str
    due_ms: int
    payload: str
    challenge_id: Optional[str] = None
    revealed_letter: Optional[str] = None


class ResetStartResponse(BaseModel):
    token: str
    expires_ms: int
    questions: list[dict]


class ResetSubmitRequest(BaseModel):
    answers: list[str]


class ResetSubmitResponse(BaseModel):
    outcome: str
