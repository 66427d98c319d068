"""The security payoff: password reset against the avatar profile.

A reset asks m of the schema's questions, chosen seeded-randomly subject to
an entropy floor, and grants access when at least k normalized answers
match the profile. Attempts are throttled per day and locked out after a
run of consecutive failures; every call is recorded as an append-only
attempt.

The analytic guessing model treats the attacker as drawing distinct uniform
guesses over the joint answer space. For k = m that collapses to
budget / product(pool sizes); for partial credit it is a hypergeometric hit
against the set of tuples agreeing with the truth in at least k places.
"""

from __future__ import annotations

import itertools
import secrets
from dataclasses import dataclass, field
from enum import Enum
from math import prod

from .avatar import AvatarProfile, AvatarSchema, normalize_answer, question_set_entropy
from .errors import EntropyUnattainable, InvalidConfig, SessionUnknown
from .player import MS_PER_DAY, local_day
from .rng import SplitMix64, fnv1a64, mix64

RESET_SESSION_TTL_MS = 15 * 60 * 1000


@dataclass(frozen=True)
class AuthPolicy:
    m: int = 3
    k: int = 3
    max_attempts_per_day: int = 3
    lockout_after: int = 10
    min_entropy_bits: float = 15.0

    def __post_init__(self):
        if not 1 <= self.k <= self.m:
            raise InvalidConfig("need 1 <= k <= m")
        if self.max_attempts_per_day < 1:
            raise InvalidConfig("max_attempts_per_day must be >= 1")
        if self.lockout_after < 1:
            raise InvalidConfig("lockout_after must be >= 1")
        if self.min_entropy_bits < 0:
            raise InvalidConfig("min_entropy_bits must be >= 0")


class AuthOutcome(str, Enum):
    GRANTED = "granted"
    DENIED = "denied"
    LOCKED = "locked"


@dataclass(frozen=True)
class AuthAttempt:
    timestamp_ms: int
    question_set: tuple[str, ...]
    answers_given: tuple[str, ...]
    outcome: AuthOutcome


@dataclass(frozen=True)
class AuthDecision:
    outcome: AuthOutcome
    attempt: AuthAttempt


def select_questions(
    profile: AvatarProfile, schema: AvatarSchema, policy: AuthPolicy, seed: int
) -> list[str]:
    """A seeded-random m-field subset meeting the policy's entropy floor.

    The field order is shuffled by the seed, then subsets are tried in a
    fixed enumeration over that order, so the choice is deterministic and
    the search is exhaustive: EntropyUnattainable really means no subset
    qualifies.
    """
    field_ids = schema.field_ids()
    if len(field_ids) < policy.m:
        raise EntropyUnattainable(f"schema has {len(field_ids)} fields, policy asks {policy.m}")
    stream = SplitMix64(mix64(seed, fnv1a64("question-select"), fnv1a64(profile.profile_id)))
    stream.shuffle(field_ids)
    for combo in itertools.combinations(field_ids, policy.m):
        if question_set_entropy(schema, list(combo)) >= policy.min_entropy_bits:
            return list(combo)
    raise EntropyUnattainable(
        f"no {policy.m}-field subset reaches {policy.min_entropy_bits} bits"
    )


def _consecutive_failures(history: list[AuthAttempt]) -> int:
    """Trailing denied count; locked records are skipped, a grant resets it."""
    count = 0
    for attempt in reversed(history):
        if attempt.outcome is AuthOutcome.LOCKED:
            continue
        if attempt.outcome is AuthOutcome.DENIED:
            count += 1
            continue
        break
    return count


def verify_reset(
    profile: AvatarProfile,
    question_set: list[str],
    answers: list[str],
    policy: AuthPolicy,
    history: list[AuthAttempt],
    now_ms: int,
) -> AuthDecision:
    """Judge one reset attempt and append it to the history.

    Throttling preempts evaluation: at the daily attempt cap or past the
    consecutive-failure lockout, the answers are never judged.
    """
    if len(answers) != len(question_set):
        raise InvalidConfig("answers must align with the question set")

    today = local_day(now_ms, "UTC")
    attempts_today = sum(1 for a in history if local_day(a.timestamp_ms, "UTC") == today)
    if attempts_today >= policy.max_attempts_per_day or (
        _consecutive_failures(history) >= policy.lockout_after
    ):
        outcome = AuthOutcome.LOCKED
    else:
        matches = sum(
            1
            for fid, given in zip(question_set, answers)
            if normalize_answer(given) == normalize_answer(profile.answer_for(fid))
        )
        outcome = AuthOutcome.GRANTED if matches >= policy.k else AuthOutcome.DENIED

    attempt = AuthAttempt(
        timestamp_ms=now_ms,
        question_set=tuple(question_set),
        answers_given=tuple(answers),
        outcome=outcome,
    )
    history.append(attempt)
    return AuthDecision(outcome=outcome, attempt=attempt)


# -- analytic guessing model ---------------------------------------------------


def win_set_size(pool_sizes: list[int], k: int) -> int:
    """Tuples agreeing with a fixed truth in at least k coordinates.

    Sum over coordinate subsets S with |S| >= k of prod(n_i - 1) over the
    disagreeing coordinates; independent of which truth, so the attacker's
    view is symmetric.
    """
    m = len(pool_sizes)
    total = 0
    for r in range(k, m + 1):
        for agree in itertools.combinations(range(m), r):
            agree_set = set(agree)
            total += prod(pool_sizes[i] - 1 for i in range(m) if i not in agree_set)
    return total


def guess_success_probability(
    schema: AvatarSchema, question_set: list[str], policy: AuthPolicy, attacker_budget: int
) -> float:
    """P(attacker reaches >= k of m within the budget), distinct uniform guesses.

    1 - C(N - w, b) / C(N, b) with N the joint space and w the win set;
    budget 0 gives 0 and budgets beyond N - w give 1.
    """
    if attacker_budget < 0:
        raise InvalidConfig("attacker_budget must be >= 0")
    if len(question_set) != policy.m:
        raise InvalidConfig("question_set size must equal policy.m")
    sizes = [len(schema.field(fid).answer_pool) for fid in question_set]
    n_total = prod(sizes)
    w = win_set_size(sizes, policy.k)
    if attacker_budget == 0:
        return 0.0
    if attacker_budget > n_total - w:
        return 1.0
    miss = 1.0
    for t in range(attacker_budget):
        miss *= (n_total - w - t) / (n_total - t)
    return 1.0 - miss


# -- reset sessions ------------------------------------------------------------


@dataclass
class ResetSession:
    token: str
    player_id: str
    question_set: tuple[str, ...]
    issued_ms: int


@dataclass
class ResetSessionStore:
    """In-memory reset sessions; tokens expire after 15 minutes."""

    ttl_ms: int = RESET_SESSION_TTL_MS
    _sessions: dict[str, ResetSession] = field(default_factory=dict)

    def open(self, player_id: str, question_set: list[str], now_ms: int) -> ResetSession:
        token = secrets.token_hex(16)
        session = ResetSession(
            token=token,
            player_id=player_id,
            question_set=tuple(question_set),
            issued_ms=now_ms,
        )
        self._sessions[token] = session
        return session

    def resolve(self, player_id: str, token: str, now_ms: int) -> ResetSession:
        """Look up and consume a token; unknown, foreign, or expired -> SessionUnknown."""
        session = self._sessions.get(token)
        if session is None or session.player_id != player_id:
            raise SessionUnknown(token)
        if now_ms - session.issued_ms > self.ttl_ms:
            del self._sessions[token]
            raise SessionUnknown(token)
        del self._sessions[token]
        return session
