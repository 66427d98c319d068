import json

import pytest
from fastapi.testclient import TestClient

from avatarquest.avatar import default_schema, generate_profile
from avatarquest.challenges import default_bank, entry_by_id
from avatarquest.config import GameConfig
from avatarquest.player import MS_PER_DAY, MS_PER_HOUR
from avatarquest.service.app import GameService, create_app

T0 = 1_767_603_600_000  # 2026-01-05T09:00Z, a Monday
SEED = 42


@pytest.fixture()
def client(tmp_path):
    service = GameService(tmp_path)
    return TestClient(create_app(service))


@pytest.fixture(scope="module")
def profile():
    return generate_profile(default_schema(), SEED)


@pytest.fixture(scope="module")
def bank():
    return default_bank()


def create_player(client, seed=SEED, ts=T0):
    response = client.post("/players", json={"seed": seed}, params={"now": ts})
    assert response.status_code == 200
    return response.json()["player_id"]


def answer_for_item(item, profile, bank):
    cid = item["challenge_id"]
    if cid.startswith("av:"):
        return profile.assignments[cid.split(":")[1]]
    return entry_by_id(bank, cid.split(":")[1]).answer


def play_session(client, pid, profile, bank, ts, wrong_indices=()):
    session = client.get(f"/players/{pid}/session", params={"now": ts}).json()
    replies = []
    for i, item in enumerate(session["items"]):
        submission = answer_for_item(item, profile, bank)
        if i in wrong_indices:
            submission = "definitely wrong"
        reply = client.post(
            f"/players/{pid}/challenges/{item['challenge_id']}/answer",
            params={"now": ts + (i + 1) * 60_000},
            json={"submission": submission},
        )
        assert reply.status_code == 200
        replies.append(reply.json())
    return session, replies


def test_create_player_returns_ids(client):
    response = client.post("/players", json={"seed": 7}, params={"now": T0})
    body = response.json()
    assert body["schema_id"] == "classic-v1"
    assert body["profile_id"].endswith("0000000000000007")
    assert body["player_id"]


def test_session_serialization_is_client_safe(client, profile):
    pid = create_player(client)
    session = client.get(f"/players/{pid}/session", params={"now": T0}).json()
    assert session["avatar_count"] == 6
    assert len(session["items"]) == 10
    text = json.dumps(session)
    for item in session["items"]:
        cid = item["challenge_id"]
        assert "answer" not in {k for k, v in item.items() if v is not None}
        if cid.startswith("av:"):
            assert item["answer_length"] is None
            answer = profile.assignments[cid.split(":")[1]]
            if item["options"]:
                assert item["options"].count(answer) == 1
            else:
                assert answer.casefold() not in json.dumps(item).casefold()
                assert len(item["letter_pool"]) == 12


def test_correct_answers_score_and_badge(client, profile, bank):
    pid = create_player(client)
    session, replies = play_session(client, pid, profile, bank, T0)
    kinds_seen = {r["kind"] for r in replies}
    assert kinds_seen == {"standard", "avatar_recognition", "avatar_recall"}
    for reply in replies:
        expected = {"standard": 10, "avatar_recognition": 15, "avatar_recall": 20}[reply["kind"]]
        assert reply["correct"] is True
        assert reply["score"]["delta"] == expected
    badges = [b["kind"] for r in replies for b in r["new_badges"]]
    assert badges == ["smiley", "cake", "trophy"]


def test_wrong_answer_deducts_and_encourages(client, profile, bank):
    pid = create_player(client)
    session, replies = play_session(client, pid, profile, bank, T0, wrong_indices=(0,))
    first = replies[0]
    assert first["correct"] is False
    assert first["score"]["delta"] <= 0
    assert first["social_cue"]["trigger"] == "incorrect_answer"
    assert first["social_cue"]["severity"] in ("positive", "neutral")


def test_unknown_challenge_is_404(client):
    pid = create_player(client)
    reply = client.post(
        f"/players/{pid}/challenges/av:nope:rcl:0000000000000000/answer",
        params={"now": T0},
        json={"submission": "x"},
    )
    assert reply.status_code == 404
    assert client.get("/players/ghost/session", params={"now": T0}).status_code == 404


def test_hint_flow_costs_30_then_conflicts(client, profile, bank):
    pid = create_player(client)
    play_session(client, pid, profile, bank, T0)  # earn points
    session = client.get(f"/players/{pid}/session", params={"now": T0 + MS_PER_HOUR}).json()
    cid = session["items"][0]["challenge_id"]
    hint = client.post(f"/players/{pid}/challenges/{cid}/hint", params={"now": T0 + MS_PER_HOUR})
    assert hint.status_code == 200
    body = hint.json()
    assert body["cost"] == 30
    assert len(body["cues"]) == 4
    again = client.post(f"/players/{pid}/challenges/{cid}/hint", params={"now": T0 + MS_PER_HOUR})
    assert again.status_code == 409


def test_hint_without_points_is_402(client):
    pid = create_player(client)
    session = client.get(f"/players/{pid}/session", params={"now": T0}).json()
    cid = session["items"][0]["challenge_id"]
    hint = client.post(f"/players/{pid}/challenges/{cid}/hint", params={"now": T0})
    assert hint.status_code == 402


def test_report_periods_and_stage_progress(client, profile, bank):
    pid = create_player(client)
    for day in range(7):
        play_session(client, pid, profile, bank, T0 + day * MS_PER_DAY)
    final_ts = T0 + 6 * MS_PER_DAY + 5 * MS_PER_HOUR
    day_report = client.get(
        f"/players/{pid}/report", params={"period": "day", "now": final_ts}
    ).json()
    assert day_report["solved_avatar_correct"] == 6
    week_report = client.get(
        f"/players/{pid}/report", params={"period": "week", "now": final_ts}
    ).json()
    assert week_report["solved_avatar_correct"] == 42
    assert week_report["stage"] == "late"
    assert week_report["remaining_to_next_stage"] == "already_late"
    assert len(week_report["series"]) == 7
    assert client.get(
        f"/players/{pid}/report", params={"period": "decade", "now": final_ts}
    ).status_code == 422


def test_notifications_reminder_and_dedup(client, profile, bank):
    pid = create_player(client)
    play_session(client, pid, profile, bank, T0)
    idle = T0 + 30 * MS_PER_HOUR
    notes = client.get(f"/players/{pid}/notifications", params={"now": idle}).json()
    kinds = [n["kind"] for n in notes]
    assert "reminder" in kinds
    again = client.get(f"/players/{pid}/notifications", params={"now": idle + MS_PER_HOUR}).json()
    assert all(n["kind"] != "reminder" for n in again)


def test_stuck_offer_reveals_one_letter(client, profile, bank):
    pid = create_player(client)
    session = client.get(f"/players/{pid}/session", params={"now": T0}).json()
    # leave everything unanswered for 25 hours
    notes = client.get(
        f"/players/{pid}/notifications", params={"now": T0 + 25 * MS_PER_HOUR}
    ).json()
    offers = [n for n in notes if n["kind"] == "stuck_hint_offer"]
    assert offers
    open_ids = {item["challenge_id"] for item in session["items"]}
    for offer in offers:
        assert offer["challenge_id"] in open_ids
        answer = answer_for_item(
            next(i for i in session["items"] if i["challenge_id"] == offer["challenge_id"]),
            profile,
            bank,
        )
        first_letter = next(c for c in answer.upper() if c.isalpha())
        assert offer["revealed_letter"] == first_letter


def test_reset_flow_grants_denies_and_locks(client, profile):
    pid = create_player(client)
    start = client.post(f"/auth/{pid}/reset", params={"now": T0}).json()
    assert len(start["questions"]) == 3
    answers = [profile.assignments[q["field_id"]] for q in start["questions"]]
    verdict = client.post(
        f"/auth/{pid}/reset/{start['token']}", params={"now": T0 + 1000}, json={"answers": answers}
    ).json()
    assert verdict["outcome"] == "granted"

    denied_token = client.post(f"/auth/{pid}/reset", params={"now": T0 + 2000}).json()
    wrong = ["x"] * 3
    outcome = client.post(
        f"/auth/{pid}/reset/{denied_token['token']}",
        params={"now": T0 + 3000},
        json={"answers": wrong},
    ).json()
    assert outcome["outcome"] == "denied"

    third = client.post(f"/auth/{pid}/reset", params={"now": T0 + 4000}).json()
    client.post(
        f"/auth/{pid}/reset/{third['token']}", params={"now": T0 + 5000}, json={"answers": wrong}
    )
    fourth = client.post(f"/auth/{pid}/reset", params={"now": T0 + 6000}).json()
    locked = client.post(
        f"/auth/{pid}/reset/{fourth['token']}",
        params={"now": T0 + 7000},
        json={"answers": [profile.assignments[q["field_id"]] for q in fourth["questions"]]},
    ).json()
    assert locked["outcome"] == "locked"  # 4th judged call today


def test_reset_token_expiry_is_410(client):
    pid = create_player(client)
    start = client.post(f"/auth/{pid}/reset", params={"now": T0}).json()
    late = client.post(
        f"/auth/{pid}/reset/{start['token']}",
        params={"now": T0 + 16 * 60_000},
        json={"answers": ["a", "b", "c"]},
    )
    assert late.status_code == 410
    assert client.post(
        f"/auth/{pid}/reset/bogus-token", params={"now": T0}, json={"answers": []}
    ).status_code == 410


def test_api_token_gate(tmp_path):
    service = GameService(tmp_path, api_token="sekrit")
    client = TestClient(create_app(service))
    assert client.post("/players", json={}).status_code == 401
    ok = client.post("/players", json={}, headers={"X-Api-Token": "sekrit"})
    assert ok.status_code == 200


def test_strict_time_ignores_now_override(tmp_path):
    service = GameService(tmp_path, allow_time_override=False)
    client = TestClient(create_app(service))
    pid = client.post("/players", json={"seed": 1}, params={"now": T0}).json()["player_id"]
    report = client.get(f"/players/{pid}/report", params={"period": "day", "now": T0}).json()
    # with the override ignored, "today" is the real clock's day, not 2026-01-05
    assert report["series"][0][0] != "2026-01-05"
