"""Operator command line.

``serve`` runs the HTTP service; ``report`` and ``autoplay`` are thin
clients over it. The rest (``gen-avatar``, ``simulate``, ``attack``,
``verify-log``) run the core library directly, no server needed.
"""

from __future__ import annotations

import json
import sys

import click
import httpx

from .avatar import default_schema, field_entropy, generate_profile, load_schema
from .config import GameConfig, config_from_dict
from .errors import AvatarQuestError, CorruptLog
from .eventlog import EventLog
from .fallback_auth import AuthPolicy, guess_success_probability
from .player import MS_PER_DAY
from .replay import load_state, snapshot_equivalent
from .simulation import (
    MemoryParams,
    SessionPolicy,
    simulate_guessing_attack,
    sweep_configs,
    write_sweep_summary,
    write_sweep_table,
)


@click.group()
def main():
    """Avatar identity trainer: game service, simulation lab, and reset verifier."""


@main.command()
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--port", default=8000, show_default=True, envvar="AVATARQUEST_PORT")
@click.option("--data-dir", default="./avatarquest-data", show_default=True, envvar="AVATARQUEST_DATA_DIR")
@click.option("--timezone", "tz", default="UTC", show_default=True, envvar="AVATARQUEST_TZ")
@click.option("--fsync/--no-fsync", default=False, show_default=True, help="fsync the log on every append")
@click.option("--strict-time", is_flag=True, help="reject the ?now= time override (production mode)")
@click.option("--api-token", default=None, envvar="AVATARQUEST_API_TOKEN", help="require X-Api-Token on requests")
def serve(host, port, data_dir, tz, fsync, strict_time, api_token):
    """Run the game service."""
    import uvicorn

    from .service.app import GameService, create_app

    service = GameService(
        data_dir,
        config=GameConfig(timezone=tz),
        fsync=fsync,
        allow_time_override=not strict_time,
        api_token=api_token,
    )
    uvicorn.run(create_app(service), host=host, port=port, log_level="warning")


@main.command("gen-avatar")
@click.option("--schema", "schema_path", type=click.Path(exists=True), default=None,
              help="schema JSON file (default: packaged schema)")
@click.option("--seed", type=int, required=True)
def gen_avatar(schema_path, seed):
    """Generate an avatar profile deterministically from a seed."""
    schema = load_schema(schema_path) if schema_path else default_schema()
    profile = generate_profile(schema, seed)
    bits = {fid: field_entropy(schema, fid) for fid in schema.field_ids()}
    click.echo(
        json.dumps(
            {
                "profile_id": profile.profile_id,
                "schema_id": profile.schema_id,
                "seed": profile.seed,
                "assignments": profile.assignments,
                "field_entropy_bits": bits,
                "total_entropy_bits": sum(bits.values()),
            },
            indent=2,
        )
    )


def _parse_seed_range(text: str) -> list[int]:
    if ".." in text:
        lo, hi = text.split("..", 1)
        return list(range(int(lo), int(hi) + 1))
    return [int(text)]


@main.command()
@click.option("--config", "config_path", type=click.Path(exists=True), default=None,
              help="JSON: {grid: [game configs], memory: {...}, session_policy: {...}}")
@click.option("--seeds", default="0..9", show_default=True, help="inclusive range A..B or one seed")
@click.option("--horizon-days", default=90, show_default=True)
@click.option("--out", "out_path", required=True, type=click.Path())
@click.option("--table", "table_path", type=click.Path(), default=None,
              help="also write a tab-delimited table (default: OUT with .tsv)")
def simulate(config_path, seeds, horizon_days, out_path, table_path):
    """Sweep rehearsal configurations with simulated players."""
    doc = {}
    if config_path:
        with open(config_path, encoding="utf-8") as fh:
            doc = json.load(fh)
    grid = [config_from_dict(raw) for raw in doc.get("grid", [{}])]
    memory = MemoryParams(**doc.get("memory", {}))
    policy = SessionPolicy(**doc.get("session_policy", {}))
    rows = sweep_configs(grid, memory, _parse_seed_range(seeds), horizon_days, policy)
    write_sweep_summary(rows, out_path)
    write_sweep_table(rows, table_path or out_path + ".tsv")
    click.echo(f"wrote {len(rows)} config summaries to {out_path}")


@main.command()
@click.option("--schema", "schema_path", type=click.Path(exists=True), default=None)
@click.option("--model", type=click.Choice(["uniform", "zipf"]), default="uniform", show_default=True)
@click.option("--zipf-s", default=1.0, show_default=True)
@click.option("--budget", default=3, show_default=True)
@click.option("--trials", default=100_000, show_default=True)
@click.option("--seed", default=0, show_default=True)
@click.option("--questions", "m", default=3, show_default=True, help="questions asked (m)")
@click.option("--required", "k", default=3, show_default=True, help="correct answers required (k)")
def attack(schema_path, model, zipf_s, budget, trials, seed, m, k):
    """Monte Carlo guessing attack against the reset flow."""
    schema = load_schema(schema_path) if schema_path else default_schema()
    policy = AuthPolicy(m=m, k=k)
    result = simulate_guessing_attack(schema, policy, model, budget, trials, seed, zipf_s)
    out = {
        "model": result.model,
        "budget": result.budget,
        "trials": result.trials,
        "success_rate": result.success_rate,
        "std_error": result.std_error,
    }
    if model == "uniform":
        out["analytic"] = guess_success_probability(
            schema, schema.field_ids()[:m], policy, budget
        )
    click.echo(json.dumps(out, indent=2))


@main.command()
@click.option("--player", "player_id", required=True)
@click.option("--period", type=click.Choice(["day", "week", "month"]), default="day", show_default=True)
@click.option("--url", default="http://127.0.0.1:8000", show_default=True)
@click.option("--now", "now_override", type=int, default=None, help="epoch ms override")
def report(player_id, period, url, now_override):
    """Fetch a monitoring report from a running service."""
    params = {"period": period}
    if now_override is not None:
        params["now"] = now_override
    response = httpx.get(f"{url}/players/{player_id}/report", params=params, timeout=30.0)
    if response.status_code != 200:
        click.echo(f"error {response.status_code}: {response.text}", err=True)
        sys.exit(1)
    click.echo(json.dumps(response.json(), indent=2))


@main.command("verify-log")
@click.option("--data-dir", required=True, type=click.Path(exists=True), envvar="AVATARQUEST_DATA_DIR")
def verify_log(data_dir):
    """Audit the event log: checksums, ordering, replay, snapshot agreement."""
    log = EventLog(data_dir)
    report = log.verify()
    config = GameConfig()
    for player_id, entry in report["players"].items():
        if not entry["ok"]:
            continue
        try:
            load_state(log, player_id, config, use_snapshot=False)
            entry["replay_ok"] = True
        except (CorruptLog, AvatarQuestError) as exc:
            entry["replay_ok"] = False
            entry["error"] = str(exc)
            report["ok"] = False
            continue
        if log.latest_snapshot(player_id) is not None:
            entry["snapshot_ok"] = snapshot_equivalent(log, player_id, config)
            if not entry["snapshot_ok"]:
                report["ok"] = False
    click.echo(json.dumps(report, indent=2))
    if not report["ok"]:
        sys.exit(1)


@main.command()
@click.option("--url", default="http://127.0.0.1:8000", show_default=True)
@click.option("--days", default=7, show_default=True)
@click.option("--seed", type=int, default=None, help="profile seed (default: random)")
@click.option("--start-now", type=int, default=None,
              help="epoch ms of day 1 (default: server time; later days advance 24h each)")
def autoplay(url, days, seed, start_now):
    """Scripted player: create a profile and play one session per simulated day."""
    import time

    client = httpx.Client(base_url=url, timeout=30.0)
    body = {} if seed is None else {"seed": seed}
    created = client.post("/players", json=body)
    created.raise_for_status()
    player_id = created.json()["player_id"]

    base = start_now if start_now is not None else int(time.time() * 1000)

    answered = 0
    for day in range(days):
        ts = base + day * MS_PER_DAY
        session = client.get(f"/players/{player_id}/session", params={"now": ts})
        session.raise_for_status()
        for item in session.json()["items"]:
            if item.get("options"):
                submission = item["options"][0]
            elif item.get("letter_pool"):
                submission = item["letter_pool"][0]
            else:
                submission = "pass"
            reply = client.post(
                f"/players/{player_id}/challenges/{item['challenge_id']}/answer",
                params={"now": ts + 60_000},
                json={"submission": submission},
            )
            reply.raise_for_status()
            answered += 1

    final_ts = base + (days - 1) * MS_PER_DAY + 120_000
    summary = client.get(
        f"/players/{player_id}/report", params={"period": "day", "now": final_ts}
    ).json()
    click.echo(
        json.dumps(
            {
                "player_id": player_id,
                "days": days,
                "answers_submitted": answered,
                "start_ms": base,
                "stage": summary["stage"],
                "score": summary["score"],
            },
            indent=2,
        )
    )


if __name__ == "__main__":
    main()
