"""The game service: event-sourced command handling behind a FastAPI app.

Every mutation is appended to the event log first and then folded into the
cached PlayerState, so a restart (or an auditor replaying the log) lands on
the same state the live process had. Commands for one player are serialized
through a per-player lock; reads of other players proceed in parallel.

Time: handlers use the server clock unless the service allows a ``now``
query parameter override (epoch milliseconds). The override exists for
scripted clients and tests; disable it with serve --strict-time for real
deployments.
"""

from __future__ import annotations

import os
import secrets
import threading
import time
from datetime import date
from pathlib import Path
from typing import Optional, Sequence

from fastapi import Depends, FastAPI, Header, HTTPException, Query

from ..avatar import AvatarProfile, AvatarSchema, default_schema, generate_profile
from ..challenges import (
    BankEntry,
    Challenge,
    ChallengeKind,
    HintKind,
    build_avatar_challenge,
    build_standard_challenge,
    check_answer,
    client_view,
    default_bank,
    entry_by_id,
    letters_of,
)
from ..config import GameConfig
from ..engagement import CueTrigger, monitoring_report, social_cue
from ..errors import (
    AvatarQuestError,
    DuplicateGrant,
    InsufficientPoints,
    SessionUnknown,
    UnknownChallenge,
    UnknownPlayer,
)
from ..eventlog import EventKind, EventLog
from ..fallback_auth import (
    AuthAttempt,
    AuthOutcome,
    AuthPolicy,
    ResetSessionStore,
    select_questions,
    verify_reset,
)
from ..player import OpenChallenge, PlayerState, local_day, serialize_state
from ..progression import check_hint_purchase, pending_badges, score_delta
from ..replay import apply_event, load_state
from ..rng import fnv1a64, mix64
from ..scheduler import NotificationKind, due_notifications, next_session_plan
from .models import (
    AnswerRequest,
    AnswerResponse,
    BadgeModel,
    ChallengeView,
    CreatePlayerRequest,
    CreatePlayerResponse,
    HintResponse,
    NotificationModel,
    ReportResponse,
    ResetStartResponse,
    ResetSubmitRequest,
    ResetSubmitResponse,
    ScoreEventModel,
    SessionResponse,
    SocialCueModel,
)

SNAPSHOT_EVERY = 1000
MILESTONE_POINTS = 500


def now_ms() -> int:
    return int(time.time() * 1000)


class GameService:
    def __init__(
        self,
        data_dir: str | Path,
        config: Optional[GameConfig] = None,
        auth_policy: Optional[AuthPolicy] = None,
        schema: Optional[AvatarSchema] = None,
        bank: Optional[Sequence[BankEntry]] = None,
        fsync: bool = False,
        allow_time_override: bool = True,
        api_token: Optional[str] = None,
    ):
        self.config = config if config is not None else GameConfig()
        self.auth_policy = auth_policy if auth_policy is not None else AuthPolicy()
        self.schema = schema if schema is not None else default_schema()
        self.bank = list(bank) if bank is not None else default_bank()
        self.log = EventLog(data_dir, fsync=fsync)
        self.allow_time_override = allow_time_override
        self.api_token = api_token
        self.resets = ResetSessionStore()
        self._states: dict[str, PlayerState] = {}
        self._locks: dict[str, threading.Lock] = {}
        self._guard = threading.Lock()

    # -- state plumbing -----------------------------------------------------

    def lock_for(self, player_id: str) -> threading.Lock:
        with self._guard:
            return self._locks.setdefault(player_id, threading.Lock())

    def state_of(self, player_id: str) -> PlayerState:
        state = self._states.get(player_id)
        if state is None:
            state = load_state(self.log, player_id, self.config)
            self._states[player_id] = state
        return state

    def _append(self, player_id: str, kind: EventKind, payload: dict, ts_ms: int):
        event = self.log.append(player_id, kind.value, payload, ts_ms)
        state = apply_event(self._states.get(player_id), event, self.config)
        self._states[player_id] = state
        if event.sequence_number % SNAPSHOT_EVERY == 0:
            self.log.write_snapshot(player_id, event.sequence_number, serialize_state(state))
        return event

    def profile_of(self, state: PlayerState) -> AvatarProfile:
        return generate_profile(self.schema, state.profile_seed)

    def challenge_of(self, state: PlayerState, open_challenge: OpenChallenge) -> Challenge:
        kind = ChallengeKind(open_challenge.kind)
        if kind is ChallengeKind.STANDARD:
            entry = entry_by_id(self.bank, open_challenge.entry_id)
            return build_standard_challenge(
                entry, open_challenge.seed, self.config.hide_length_scope
            )
        return build_avatar_challenge(
            self.profile_of(state),
            self.schema,
            open_challenge.field_id,
            kind,
            open_challenge.seed,
            self.config.option_count,
        )

    # -- commands -----------------------------------------------------------

    def create_player(self, seed: Optional[int], timezone: str, ts_ms: int) -> dict:
        player_id = f"p{secrets.token_hex(8)}"
        profile_seed = seed if seed is not None else secrets.randbits(64)
        profile = generate_profile(self.schema, profile_seed)
        with self.lock_for(player_id):
            self._append(
                player_id,
                EventKind.PROFILE_CREATED,
                {"schema_id": self.schema.schema_id, "seed": profile_seed, "timezone": timezone},
                ts_ms,
            )
        return {
            "player_id": player_id,
            "schema_id": self.schema.schema_id,
            "profile_id": profile.profile_id,
        }

    def issue_session(self, player_id: str, ts_ms: int) -> dict:
        with self.lock_for(player_id):
            state = self.state_of(player_id)
            plan = next_session_plan(
                state,
                self.schema,
                self.bank,
                self.config,
                ts_ms,
                mix64(fnv1a64(player_id), ts_ms),
            )
            items_payload = []
            for item in plan.items:
                entry: dict = {
                    "challenge_id": item.challenge_id,
                    "kind": item.kind.value,
                    "seed": item.seed,
                }
                if item.field_id is not None:
                    entry["field_id"] = item.field_id
                if item.entry_id is not None:
                    entry["entry_id"] = item.entry_id
                items_payload.append(entry)
            self._append(
                player_id,
                EventKind.SESSION_ISSUED,
                {
                    "session_id": plan.session_id,
                    "items": items_payload,
                    "avatar_count": plan.avatar_count,
                    "recognition_fraction": plan.recognition_fraction,
                },
                ts_ms,
            )
            state = self.state_of(player_id)
            views = []
            for item in plan.items:
                challenge = self.challenge_of(state, state.open_challenges[item.challenge_id])
                views.append(client_view(challenge))
        return {
            "session_id": plan.session_id,
            "created_ms": plan.created_ms,
            "avatar_count": plan.avatar_count,
            "recognition_fraction": plan.recognition_fraction,
            "items": views,
        }

    def submit_answer(self, player_id: str, challenge_id: str, submission: str, ts_ms: int) -> dict:
        with self.lock_for(player_id):
            state = self.state_of(player_id)
            open_challenge = state.open_challenges.get(challenge_id)
            if open_challenge is None:
                raise UnknownChallenge(challenge_id)
            challenge = self.challenge_of(state, open_challenge)
            verdict = check_answer(challenge, submission)

            day = local_day(ts_ms, state.timezone)
            first_of_day = day not in state.days_played
            lapse_days = 0
            if state.last_played_ms is not None and first_of_day:
                previous = date.fromisoformat(local_day(state.last_played_ms, state.timezone))
                lapse_days = max(0, (date.fromisoformat(day) - previous).days - 1)

            balance_before = state.balance
            delta = score_delta(balance_before, challenge.kind, verdict.correct)
            payload = {
                "challenge_id": challenge_id,
                "kind": challenge.kind.value,
                "correct": verdict.correct,
                "unspellable": verdict.unspellable,
                "delta": delta,
                "balance_after": balance_before + delta,
                "session_id": open_challenge.session_id,
            }
            if open_challenge.field_id is not None:
                payload["field_id"] = open_challenge.field_id
            self._append(player_id, EventKind.ANSWER_JUDGED, payload, ts_ms)
            state = self.state_of(player_id)

            new_badges = pending_badges(state, self.config.daily_quota, ts_ms)
            for badge in new_badges:
                self._append(
                    player_id,
                    EventKind.BADGE_AWARDED,
                    {"badge": badge.kind.value, "date": badge.date},
                    ts_ms,
                )
            state = self.state_of(player_id)

            crossed_milestone = (
                delta > 0 and balance_before // MILESTONE_POINTS < state.balance // MILESTONE_POINTS
            )
            if not verdict.correct:
                cue = social_cue(CueTrigger.INCORRECT_ANSWER, state)
            elif new_badges or crossed_milestone:
                cue = social_cue(CueTrigger.MILESTONE, state)
            elif lapse_days >= 2:
                cue = social_cue(CueTrigger.LAPSE, state, lapse_days=lapse_days)
            elif first_of_day:
                cue = social_cue(CueTrigger.DAILY_RETURN, state)
            else:
                cue = None

            return {
                "correct": verdict.correct,
                "unspellable": verdict.unspellable,
                "kind": challenge.kind.value,
                "score": {
                    "challenge_id": challenge_id,
                    "kind": challenge.kind.value,
                    "delta": delta,
                    "balance_after": state.balance,
                    "timestamp_ms": ts_ms,
                },
                "new_badges": [{"kind": b.kind.value, "date": b.date} for b in new_badges],
                "social_cue": None
                if cue is None
                else {
                    "trigger": cue.trigger.value,
                    "text": cue.text,
                    "severity": cue.severity.value,
                    "lapse_days": cue.lapse_days,
                },
                "stage": state.stage,
            }

    def buy_hint(self, player_id: str, challenge_id: str, ts_ms: int) -> dict:
        with self.lock_for(player_id):
            state = self.state_of(player_id)
            open_challenge = state.open_challenges.get(challenge_id)
            if open_challenge is None:
                raise UnknownChallenge(challenge_id)
            cost = check_hint_purchase(state, challenge_id, HintKind.VERBAL_CUES)
            self._append(
                player_id,
                EventKind.HINT_PURCHASED,
                {"challenge_id": challenge_id, "cost": cost, "kind": HintKind.VERBAL_CUES.value},
                ts_ms,
            )
            state = self.state_of(player_id)
            challenge = self.challenge_of(state, open_challenge)
            return {
                "challenge_id": challenge_id,
                "kind": HintKind.VERBAL_CUES.value,
                "cost": cost,
                "balance_after": state.balance,
                "cues": list(challenge.verbal_cues),
            }

    def report(self, player_id: str, period: str, ts_ms: int) -> dict:
        events = self.log.read_events(player_id)
        return monitoring_report(events, player_id, period, ts_ms, self.config).to_dict()

    def notifications(self, player_id: str, ts_ms: int) -> list[dict]:
        with self.lock_for(player_id):
            state = self.state_of(player_id)
            due = due_notifications(state, ts_ms)
            out = []
            for note in due:
                payload = {"notification_kind": note.kind.value}
                if note.challenge_id is not None:
                    payload["challenge_id"] = note.challenge_id
                self._append(player_id, EventKind.NOTIFICATION_SENT, payload, ts_ms)
                revealed = None
                if note.kind is NotificationKind.STUCK_HINT_OFFER and note.challenge_id:
                    state = self.state_of(player_id)
                    open_challenge = state.open_challenges.get(note.challenge_id)
                    if open_challenge is not None:
                        challenge = self.challenge_of(state, open_challenge)
                        revealed = letters_of(challenge.answer)[0]
                out.append(
                    {
                        "kind": note.kind.value,
                        "player_id": note.player_id,
                        "due_ms": note.due_ms,
                        "payload": note.payload,
                        "challenge_id": note.challenge_id,
                        "revealed_letter": revealed,
                    }
                )
            return out

    def reset_start(self, player_id: str, ts_ms: int) -> dict:
        with self.lock_for(player_id):
            state = self.state_of(player_id)
            profile = self.profile_of(state)
            questions = select_questions(
                profile, self.schema, self.auth_policy, mix64(fnv1a64(player_id), ts_ms)
            )
            session = self.resets.open(player_id, questions, ts_ms)
        return {
            "token": session.token,
            "expires_ms": session.issued_ms + self.resets.ttl_ms,
            "questions": [
                {"field_id": fid, "question_text": self.schema.field(fid).question_text}
                for fid in questions
            ],
        }

    def reset_submit(self, player_id: str, token: str, answers: list[str], ts_ms: int) -> dict:
        with self.lock_for(player_id):
            state = self.state_of(player_id)
            session = self.resets.resolve(player_id, token, ts_ms)
            profile = self.profile_of(state)
            history = [
                AuthAttempt(
                    timestamp_ms=a["timestamp_ms"],
                    question_set=tuple(a["question_set"]),
                    answers_given=(),
                    outcome=AuthOutcome(a["outcome"]),
                )
                for a in state.auth_attempts
            ]
            decision = verify_reset(
                profile, list(session.question_set), answers, self.auth_policy, history, ts_ms
            )
            self._append(
                player_id,
                EventKind.AUTH_ATTEMPTED,
                {
                    "outcome": decision.outcome.value,
                    "question_set": list(session.question_set),
                },
                ts_ms,
            )
            return {"outcome": decision.outcome.value}


def create_app(service: GameService) -> FastAPI:
    app = FastAPI(title="avatarquest", version="0.1.0")
    app.state.service = service

    def request_time(now: Optional[int] = Query(default=None, ge=0)) -> int:
        if now is not None and service.allow_time_override:
            return now
        return now_ms()

    def check_token(x_api_token: Optional[str] = Header(default=None)) -> None:
        if service.api_token and x_api_token != service.api_token:
            raise HTTPException(status_code=401, detail="missing or wrong API token")

    def guard(call):
        try:
            return call()
        except (UnknownPlayer, UnknownChallenge) as exc:
            raise HTTPException(status_code=404, detail=str(exc)) from exc
        except SessionUnknown as exc:
            raise HTTPException(status_code=410, detail=f"reset session unknown or expired: {exc}") from exc
        except InsufficientPoints as exc:
            raise HTTPException(status_code=402, detail=str(exc)) from exc
        except DuplicateGrant as exc:
            raise HTTPException(status_code=409, detail=str(exc)) from exc
        except AvatarQuestError as exc:
            raise HTTPException(status_code=400, detail=str(exc)) from exc

    @app.get("/healthz")
    def healthz():
        return {"ok": True}

    @app.post("/players", response_model=CreatePlayerResponse, dependencies=[Depends(check_token)])
    def create_player(body: CreatePlayerRequest, ts: int = Depends(request_time)):
        return guard(lambda: service.create_player(body.seed, body.timezone, ts))

    @app.get(
        "/players/{player_id}/session",
        response_model=SessionResponse,
        dependencies=[Depends(check_token)],
    )
    def get_session(player_id: str, ts: int = Depends(request_time)):
        return guard(lambda: service.issue_session(player_id, ts))

    @app.post(
        "/players/{player_id}/challenges/{challenge_id}/answer",
        response_model=AnswerResponse,
        dependencies=[Depends(check_token)],
    )
    def post_answer(
        player_id: str, challenge_id: str, body: AnswerRequest, ts: int = Depends(request_time)
    ):
        return guard(lambda: service.submit_answer(player_id, challenge_id, body.submission, ts))

    @app.post(
        "/players/{player_id}/challenges/{challenge_id}/hint",
        response_model=HintResponse,
        dependencies=[Depends(check_token)],
    )
    def post_hint(player_id: str, challenge_id: str, ts: int = Depends(request_time)):
        return guard(lambda: service.buy_hint(player_id, challenge_id, ts))

    @app.get(
        "/players/{player_id}/report",
        response_model=ReportResponse,
        dependencies=[Depends(check_token)],
    )
    def get_report(player_id: str, period: str = "day", ts: int = Depends(request_time)):
        if period not in ("day", "week", "month"):
            raise HTTPException(status_code=422, detail="period must be day, week, or month")
        return guard(lambda: service.report(player_id, period, ts))

    @app.get(
        "/players/{player_id}/notifications",
        response_model=list[NotificationModel],
        dependencies=[Depends(check_token)],
    )
    def get_notifications(player_id: str, ts: int = Depends(request_time)):
        return guard(lambda: service.notifications(player_id, ts))

    @app.post(
        "/auth/{player_id}/reset",
        response_model=ResetStartResponse,
        dependencies=[Depends(check_token)],
    )
    def post_reset(player_id: str, ts: int = Depends(request_time)):
        return guard(lambda: service.reset_start(player_id, ts))

    @app.post(
        "/auth/{player_id}/reset/{token}",
        response_model=ResetSubmitResponse,
        dependencies=[Depends(check_token)],
    )
    def post_reset_submit(
        player_id: str, token: str, body: ResetSubmitRequest, ts: int = Depends(request_time)
    ):
        return guard(lambda: service.reset_submit(player_id, token, body.answers, ts))

    return app


def app_from_env() -> FastAPI:
    """App factory for ``uvicorn avatarquest.service.app:app_from_env``."""
    data_dir = os.environ.get("AVATARQUEST_DATA_DIR", "./avatarquest-data")
    tz = os.environ.get("AVATARQUEST_TZ", "UTC")
    service = GameService(
        data_dir,
        config=GameConfig(timezone=tz),
        allow_time_override=os.environ.get("AVATARQUEST_STRICT_TIME", "") != "1",
        api_token=os.environ.get("AVATARQUEST_API_TOKEN") or None,
    )
    return create_app(service)
