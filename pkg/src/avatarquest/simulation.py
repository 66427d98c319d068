"""Desk-scale evaluation lab.

Memory model: each profile field decays exponentially from the moment it is
learned, p = 2^(-elapsed / half_life). A successful rehearsal multiplies the
half-life by growth_factor, a failed one by failure_factor; the decay clock
itself never resets, so neutral factors (both 1.0) leave the curve exactly
at pure decay. Recognition rounds are easier: their success probability is
the recall probability times recognition_boost, capped at 1.

Simulated players run through the production scheduler, challenge builders,
judging, and scoring, not a reimplementation, so sweeping a config here
exercises the same code a live service runs. The guessing attacker is a
Monte Carlo of the reset flow: uniform victims for system-generated
profiles, Zipf victims for the user-chosen baseline, with the attacker
guessing in descending assumed-popularity order.
"""

from __future__ import annotations

import heapq
import json
from dataclasses import asdict, dataclass
from math import prod, sqrt
from typing import Optional, Sequence

import numpy as np

from .avatar import AvatarSchema, default_schema, generate_profile
from .challenges import (
    BankEntry,
    ChallengeKind,
    build_avatar_challenge,
    build_standard_challenge,
    check_answer,
    default_bank,
    entry_by_id,
)
from .config import GameConfig
from .errors import InvalidConfig
from .fallback_auth import AuthPolicy
from .player import MS_PER_DAY, MS_PER_HOUR, PlayerState
from .rng import SplitMix64, fnv1a64, mix64
from .scheduler import (
    NotificationKind,
    due_notifications,
    next_session_plan,
    record_session,
    register_session,
)

# 2026-01-01T00:00:00Z; fixed so runs are reproducible byte for byte
SIM_START_MS = 1_767_225_600_000

CHECKPOINT_DAYS = (7, 30, 90, 180)


@dataclass(frozen=True)
class MemoryParams:
    initial_half_life_hours: float = 24.0
    growth_factor: float = 2.0
    failure_factor: float = 0.5
    recognition_boost: float = 2.0

    def __post_init__(self):
        if self.initial_half_life_hours <= 0:
            raise InvalidConfig("initial_half_life_hours must be positive")
        if self.growth_factor < 1.0:
            raise InvalidConfig("growth_factor must be >= 1")
        if not 0.0 < self.failure_factor <= 1.0:
            raise InvalidConfig("failure_factor must be in (0, 1]")
        if self.recognition_boost < 1.0:
            raise InvalidConfig("recognition_boost must be >= 1")


@dataclass
class FieldMemory:
    """One field's simulated trace.

    last_rehearsal_ms anchors the decay clock at the moment the field was
    learned; rehearsals act on the half-life, not the clock.
    """

    half_life_hours: float
    last_rehearsal_ms: int


@dataclass(frozen=True)
class SessionPolicy:
    adherence: float = 0.8
    standard_skill: float = 0.9

    def __post_init__(self):
        if not 0.0 <= self.adherence <= 1.0:
            raise InvalidConfig("adherence must be in [0, 1]")
        if not 0.0 <= self.standard_skill <= 1.0:
            raise InvalidConfig("standard_skill must be in [0, 1]")


@dataclass(frozen=True)
class SimOutcome:
    config: dict
    checkpoints: tuple[tuple[int, float], ...]
    final_recall_180d: float
    sessions_played: int
    reminders_sent: int


def recall_probability(memory: FieldMemory, now_ms: int, mode: ChallengeKind, params: MemoryParams) -> float:
    """P(unassisted success) after the elapsed decay, boosted for recognition."""
    if now_ms < memory.last_rehearsal_ms:
        raise InvalidConfig("now precedes the memory's anchor")
    dt_hours = (now_ms - memory.last_rehearsal_ms) / MS_PER_HOUR
    p = 2.0 ** (-dt_hours / memory.half_life_hours)
    if mode is ChallengeKind.AVATAR_RECOGNITION:
        p = min(1.0, p * params.recognition_boost)
    return p


def _mean_recall(memory: dict[str, FieldMemory], now_ms: int, params: MemoryParams) -> float:
    probes = [
        recall_probability(mem, now_ms, ChallengeKind.AVATAR_RECALL, params)
        for mem in memory.values()
    ]
    return sum(probes) / len(probes)


def simulate_player(
    game_config: GameConfig,
    memory_params: MemoryParams,
    horizon_days: int,
    session_policy: SessionPolicy,
    seed: int,
    schema: Optional[AvatarSchema] = None,
    bank: Optional[Sequence[BankEntry]] = None,
) -> SimOutcome:
    """Run one simulated player for ``horizon_days`` and probe their memory.

    Each day: notifications are probed at the day boundary, then with
    probability ``adherence`` the player plays a session one to four hours
    later, answering avatar rounds with their modelled recall probability
    and standard rounds at a fixed skill. Checkpoints record the mean
    unassisted recall-mode probability across all fields before that day's
    session; final_recall_180d probes the finished memory at day 180 even
    when the horizon is shorter (nothing rehearses after the horizon).
    """
    if horizon_days < 1:
        raise InvalidConfig("horizon_days must be >= 1")
    schema = schema if schema is not None else default_schema()
    bank = list(bank) if bank is not None else default_bank()

    profile = generate_profile(schema, mix64(seed, fnv1a64("sim-profile")))
    state = PlayerState(player_id=f"sim-{seed:x}")
    state.schema_id = schema.schema_id
    state.profile_seed = profile.seed
    state.created_ms = SIM_START_MS
    state.timezone = game_config.timezone

    memory = {
        fid: FieldMemory(memory_params.initial_half_life_hours, SIM_START_MS)
        for fid in schema.field_ids()
    }
    stream = SplitMix64(mix64(seed, fnv1a64("sim-player")))

    checkpoints: list[tuple[int, float]] = []
    checkpoint_days = [d for d in CHECKPOINT_DAYS if d <= horizon_days]
    sessions_played = 0
    reminders_sent = 0

    # play starts on day 0: the first session is part of onboarding
    for day in range(0, horizon_days + 1):
        day_start = SIM_START_MS + day * MS_PER_DAY
        if day in checkpoint_days:
            checkpoints.append((day, _mean_recall(memory, day_start, memory_params)))

        for note in due_notifications(state, day_start):
            if note.kind is NotificationKind.REMINDER:
                reminders_sent += 1
                state.last_reminder_ms = day_start
            elif note.challenge_id is not None:
                state.open_challenges[note.challenge_id].last_offer_ms = day_start

        if day == horizon_days or stream.random() >= session_policy.adherence:
            continue

        play_ms = day_start + MS_PER_HOUR + stream.below(3 * MS_PER_HOUR)
        plan = next_session_plan(state, schema, bank, game_config, play_ms, mix64(seed, day))
        register_session(state, plan)

        outcomes = []
        for item in plan.items:
            if item.kind is ChallengeKind.STANDARD:
                entry = entry_by_id(bank, item.entry_id)
                challenge = build_standard_challenge(entry, item.seed, game_config.hide_length_scope)
                correct = stream.random() < session_policy.standard_skill
            else:
                challenge = build_avatar_challenge(
                    profile, schema, item.field_id, item.kind, item.seed, game_config.option_count
                )
                p = recall_probability(memory[item.field_id], play_ms, item.kind, memory_params)
                correct = stream.random() < p
            verdict = check_answer(challenge, challenge.answer if correct else "")
            outcomes.append((item, verdict))
            if item.kind is not ChallengeKind.STANDARD:
                mem = memory[item.field_id]
                factor = memory_params.growth_factor if verdict.correct else memory_params.failure_factor
                mem.half_life_hours *= factor
        record_session(state, plan.session_id, outcomes, play_ms, game_config)
        sessions_played += 1

    final_recall = _mean_recall(memory, SIM_START_MS + 180 * MS_PER_DAY, memory_params)
    snapshot = {
        "game": game_config.to_dict(),
        "memory": asdict(memory_params),
        "policy": asdict(session_policy),
        "horizon_days": horizon_days,
        "seed": seed,
    }
    return SimOutcome(
        config=snapshot,
        checkpoints=tuple(checkpoints),
        final_recall_180d=final_recall,
        sessions_played=sessions_played,
        reminders_sent=reminders_sent,
    )


# -- Monte Carlo guessing attack -------------------------------------------------


@dataclass(frozen=True)
class AttackResult:
    success_rate: float
    std_error: float
    trials: int
    budget: int
    model: str


def _zipf_cdfs(sizes: list[int], s: float) -> list[np.ndarray]:
    cdfs = []
    for n in sizes:
        weights = 1.0 / np.arange(1, n + 1) ** s
        cdfs.append(np.cumsum(weights) / weights.sum())
    return cdfs


def _top_tuples_by_popularity(sizes: list[int], s: float, budget: int) -> np.ndarray:
    """The ``budget`` most popular answer tuples under per-field Zipf ranks.

    Best-first search over the rank lattice: popularity of a tuple is the
    product of its per-field Zipf weights, maximal at rank 0 everywhere.
    """
    m = len(sizes)
    budget = min(budget, prod(sizes))
    start = (0,) * m

    def neg_log_weight(tup):
        return s * sum(np.log(r + 1.0) for r in tup)

    heap = [(neg_log_weight(start), start)]
    seen = {start}
    out = []
    while heap and len(out) < budget:
        _, tup = heapq.heappop(heap)
        out.append(tup)
        for i in range(m):
            if tup[i] + 1 < sizes[i]:
                nxt = tup[:i] + (tup[i] + 1,) + tup[i + 1 :]
                if nxt not in seen:
                    seen.add(nxt)
                    heapq.heappush(heap, (neg_log_weight(nxt), nxt))
    return np.array(out, dtype=np.int64)


def _distinct_uniform_guesses(rng: np.random.Generator, n_total: int, budget: int, rows: int) -> np.ndarray:
    """(rows, budget) flat indices, distinct within each row, uniform over tuples.

    When collisions are rare (budget^2 well under the space) draw rows iid
    and redraw any row containing a duplicate; rejecting whole rows keeps
    the accepted rows exactly uniform over distinct sequences. Otherwise
    take prefixes of full per-row permutations.
    """
    if budget >= 2 and n_total < budget * (budget - 1):
        base = np.broadcast_to(np.arange(n_total, dtype=np.int64), (rows, n_total)).copy()
        return rng.permuted(base, axis=1)[:, :budget]
    flat = rng.integers(0, n_total, size=(rows, budget), dtype=np.int64)
    for _ in range(64):
        ordered = np.sort(flat, axis=1)
        dup_rows = (ordered[:, 1:] == ordered[:, :-1]).any(axis=1)
        if not dup_rows.any():
            return flat
        flat[dup_rows] = rng.integers(0, n_total, size=(int(dup_rows.sum()), budget), dtype=np.int64)
    # pathological corner: finish the stragglers row by row
    ordered = np.sort(flat, axis=1)
    for row in np.nonzero((ordered[:, 1:] == ordered[:, :-1]).any(axis=1))[0]:
        flat[row] = rng.choice(n_total, size=budget, replace=False)
    return flat


def simulate_guessing_attack(
    schema: AvatarSchema,
    policy: AuthPolicy,
    attacker: str,
    budget: int,
    trials: int,
    seed: int,
    zipf_s: float = 1.0,
    question_set: Optional[list[str]] = None,
) -> AttackResult:
    """Empirical attacker success rate over ``trials`` fresh victims.

    attacker="uniform": victims are uniform draws (system-generated data)
    and the attacker, knowing nothing better, spends the budget on distinct
    uniform-random tuples. attacker="zipf": victims pick answers with
    per-field Zipf(s) popularity (the user-chosen baseline) and the
    attacker guesses the most popular tuples first. Victim draws consume a
    dedicated stream derived from (seed), so runs with the same seed are
    paired across attacker models.
    """
    if trials < 1:
        raise InvalidConfig("trials must be >= 1")
    if budget < 0:
        raise InvalidConfig("budget must be >= 0")
    if attacker not in ("uniform", "zipf"):
        raise InvalidConfig(f"attacker must be 'uniform' or 'zipf', got {attacker!r}")
    qs = question_set if question_set is not None else schema.field_ids()[: policy.m]
    if len(qs) != policy.m:
        raise InvalidConfig("question_set size must equal policy.m")
    sizes = [len(schema.field(fid).answer_pool) for fid in qs]
    m = len(sizes)
    n_total = prod(sizes)
    k = policy.k

    if budget == 0:
        return AttackResult(0.0, 0.0, trials, budget, attacker)
    budget = min(budget, n_total)

    victim_rng = np.random.default_rng(mix64(seed, fnv1a64("attack-victims")))
    guess_rng = np.random.default_rng(mix64(seed, fnv1a64("attack-guesses")))

    strides = np.array(
        [prod(sizes[i + 1 :]) for i in range(m)], dtype=np.int64
    )
    sizes_arr = np.array(sizes, dtype=np.int64)
    cdfs = _zipf_cdfs(sizes, zipf_s) if attacker == "zipf" else None
    fixed_guesses = (
        _top_tuples_by_popularity(sizes, zipf_s, budget) if attacker == "zipf" else None
    )

    if attacker == "zipf" or not (budget >= 2 and n_total < budget * (budget - 1)):
        chunk_cap = max(1024, (1 << 23) // max(budget * m, 1))
    else:
        chunk_cap = max(1, (1 << 22) // n_total)

    successes = 0
    remaining = trials
    while remaining > 0:
        rows = min(remaining, chunk_cap)
        u = victim_rng.random((rows, m))
        if attacker == "zipf":
            victims = np.empty((rows, m), dtype=np.int64)
            for i in range(m):
                victims[:, i] = np.searchsorted(cdfs[i], u[:, i], side="right")
            matches = (victims[:, None, :] == fixed_guesses[None, :, :]).sum(axis=2)
            successes += int(((matches >= k).any(axis=1)).sum())
        else:
            victims = np.minimum((u * sizes_arr).astype(np.int64), sizes_arr - 1)
            flat = _distinct_uniform_guesses(guess_rng, n_total, budget, rows)
            coords = (flat[:, :, None] // strides[None, None, :]) % sizes_arr[None, None, :]
            matches = (coords == victims[:, None, :]).sum(axis=2)
            successes += int(((matches >= k).any(axis=1)).sum())
        remaining -= rows

    rate = successes / trials
    std_error = sqrt(rate * (1.0 - rate) / trials)
    return AttackResult(rate, std_error, trials, budget, attacker)


# -- configuration sweeps ---------------------------------------------------------


def sweep_configs(
    grid: Sequence[GameConfig],
    memory_params: MemoryParams,
    seeds: Sequence[int],
    horizon_days: int,
    session_policy: Optional[SessionPolicy] = None,
    schema: Optional[AvatarSchema] = None,
    bank: Optional[Sequence[BankEntry]] = None,
) -> list[dict]:
    """Run the grid and rank it: best mean final recall first, fewer sessions on ties."""
    if not grid:
        raise InvalidConfig("grid must be non-empty")
    policy = session_policy if session_policy is not None else SessionPolicy()
    rows = []
    for config in grid:
        outcomes = [
            simulate_player(config, memory_params, horizon_days, policy, seed, schema, bank)
            for seed in seeds
        ]
        finals = [
            o.checkpoints[-1][1] if o.checkpoints else o.final_recall_180d for o in outcomes
        ]
        rows.append(
            {
                "config": config.to_dict(),
                "mean_final_recall": sum(finals) / len(finals),
                "mean_recall_180d": sum(o.final_recall_180d for o in outcomes) / len(outcomes),
                "mean_sessions_played": sum(o.sessions_played for o in outcomes) / len(outcomes),
                "mean_reminders_sent": sum(o.reminders_sent for o in outcomes) / len(outcomes),
                "seeds": len(list(seeds)),
                "horizon_days": horizon_days,
            }
        )
    rows.sort(
        key=lambda r: (
            -r["mean_final_recall"],
            r["mean_sessions_played"],
            json.dumps(r["config"], sort_keys=True),
        )
    )
    for rank, row in enumerate(rows, start=1):
        row["rank"] = rank
    return rows


SWEEP_COLUMNS = [
    "rank",
    "daily_quota",
    "session_length",
    "mean_final_recall",
    "mean_recall_180d",
    "mean_sessions_played",
    "mean_reminders_sent",
]


def write_sweep_table(rows: list[dict], path: str) -> None:
    """Tab-delimited summary, one config per line."""
    lines = ["\t".join(SWEEP_COLUMNS)]
    for row in rows:
        lines.append(
            "\t".join(
                [
                    str(row["rank"]),
                    str(row["config"]["daily_quota"]),
                    str(row["config"]["session_length"]),
                    f"{row['mean_final_recall']:.6f}",
                    f"{row['mean_recall_180d']:.6f}",
                    f"{row['mean_sessions_played']:.2f}",
                    f"{row['mean_reminders_sent']:.2f}",
                ]
            )
        )
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("\n".join(lines) + "\n")


def write_sweep_summary(rows: list[dict], path: str) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump({"results": rows}, fh, indent=2, sort_keys=True)
        fh.write("\n")
