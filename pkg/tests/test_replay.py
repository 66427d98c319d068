import json

import pytest

from avatarquest.config import GameConfig
from avatarquest.errors import CorruptLog
from avatarquest.eventlog import EventLog
from avatarquest.player import (
    MS_PER_DAY,
    PlayerState,
    deserialize_state,
    serialize_state,
)
from avatarquest.replay import fold_events, load_state, snapshot_equivalent
from avatarquest.service.app import GameService

T0 = 1_767_603_600_000


def drive_service(tmp_path, days=3, seed=42):
    from avatarquest.avatar import default_schema, generate_profile
    from avatarquest.challenges import default_bank, entry_by_id

    service = GameService(tmp_path)
    player = service.create_player(seed, "UTC", T0)
    pid = player["player_id"]
    profile = generate_profile(default_schema(), seed)
    bank = default_bank()
    for day in range(days):
        ts = T0 + day * MS_PER_DAY
        session = service.issue_session(pid, ts)
        for i, item in enumerate(session["items"]):
            cid = item["challenge_id"]
            if cid.startswith("av:"):
                submission = profile.assignments[cid.split(":")[1]]
            else:
                submission = entry_by_id(bank, cid.split(":")[1]).answer
            if i % 3 == 2:
                submission = "definitely wrong"
            service.submit_answer(pid, cid, submission, ts + (i + 1) * 60_000)
    return service, pid


def test_state_serialization_round_trips():
    state = PlayerState(player_id="p1")
    state.days_played = {"2026-01-05", "2026-01-06"}
    state.solved_by_day = {"2026-01-05": 3}
    state.balance = 55
    text = serialize_state(state)
    assert serialize_state(deserialize_state(text)) == text


def test_full_replay_matches_live_state(tmp_path):
    service, pid = drive_service(tmp_path)
    live = serialize_state(service.state_of(pid))
    replayed = serialize_state(load_state(service.log, pid, service.config, use_snapshot=False))
    assert replayed == live


def test_replay_any_prefix_twice_is_identical(tmp_path):
    service, pid = drive_service(tmp_path, days=2)
    events = service.log.read_events(pid)
    config = service.config
    for cut in (1, len(events) // 2, len(events)):
        once = serialize_state(fold_events(events[:cut], config))
        twice = serialize_state(fold_events(events[:cut], config))
        assert once == twice


def test_snapshot_plus_tail_equals_full_replay(tmp_path):
    service, pid = drive_service(tmp_path, days=3)
    events = service.log.read_events(pid)
    midpoint = len(events) // 2
    state_at_mid = fold_events(events[:midpoint], service.config)
    service.log.write_snapshot(pid, midpoint, serialize_state(state_at_mid))
    assert snapshot_equivalent(service.log, pid, service.config)


def test_restarted_service_agrees_with_original(tmp_path):
    service, pid = drive_service(tmp_path)
    before = serialize_state(service.state_of(pid))
    reopened = GameService(tmp_path)
    after = serialize_state(reopened.state_of(pid))
    assert after == before


def test_tampered_delta_is_rejected_on_replay(tmp_path):
    service, pid = drive_service(tmp_path, days=1)
    path = service.log.events_dir / f"{pid}.log"
    lines = path.read_text().splitlines()
    # rewrite one AnswerJudged with an inflated delta and a fresh checksum
    from avatarquest.eventlog import Event, encode_record, decode_record

    tampered = []
    done = False
    for line in lines:
        event = decode_record(line)
        if not done and event.kind == "AnswerJudged" and event.payload["delta"] > 0:
            payload = dict(event.payload)
            payload["delta"] = payload["delta"] + 5
            payload["balance_after"] = payload["balance_after"] + 5
            event = Event(
                event.sequence_number, event.player_id, event.kind, payload, event.timestamp_ms
            )
            done = True
        tampered.append(encode_record(event))
    path.write_text("\n".join(tampered) + "\n")
    assert done
    with pytest.raises(CorruptLog):
        load_state(service.log, pid, service.config, use_snapshot=False)
