"""Append-only event storage.

One newline-delimited file of JSON records per player, each record carrying
a CRC-32 checksum over its canonical serialization. Records are immutable
once appended; sequence numbers are strictly increasing per player starting
at 1. Snapshots cache a serialized PlayerState at a sequence number so
replay can start from the tail instead of event 1.
"""

from __future__ import annotations

import json
import os
import threading
import zlib
from dataclasses import dataclass
from enum import Enum
from pathlib import Path
from typing import Optional

from .errors import CorruptLog, StorageFailure, UnknownPlayer


class EventKind(str, Enum):
    PROFILE_CREATED = "ProfileCreated"
    SESSION_ISSUED = "SessionIssued"
    ANSWER_JUDGED = "AnswerJudged"
    HINT_PURCHASED = "HintPurchased"
    BADGE_AWARDED = "BadgeAwarded"
    NOTIFICATION_SENT = "NotificationSent"
    AUTH_ATTEMPTED = "AuthAttempted"


@dataclass(frozen=True)
class Event:
    sequence_number: int
    player_id: str
    kind: str
    payload: dict
    timestamp_ms: int


@dataclass(frozen=True)
class Snapshot:
    player_id: str
    as_of_sequence: int
    state_json: str


def _record_dict(event: Event) -> dict:
    return {
        "kind": event.kind,
        "payload": event.payload,
        "player_id": event.player_id,
        "seq": event.sequence_number,
        "ts": event.timestamp_ms,
    }


def _checksum(record: dict) -> str:
    body = json.dumps(record, sort_keys=True, separators=(",", ":")).encode("utf-8")
    return f"{zlib.crc32(body) & 0xFFFFFFFF:08x}"


def encode_record(event: Event) -> str:
    """Canonical one-line form; parse + re-encode is byte-identical."""
    record = _record_dict(event)
    record["crc"] = _checksum(_record_dict(event))
    return json.dumps(record, sort_keys=True, separators=(",", ":"))


def decode_record(line: str) -> Event:
    try:
        record = json.loads(line)
    except json.JSONDecodeError as exc:
        raise CorruptLog(f"unparseable record: {exc}") from None
    if not isinstance(record, dict) or "crc" not in record:
        raise CorruptLog("record missing checksum")
    crc = record.pop("crc")
    expected_keys = {"kind", "payload", "player_id", "seq", "ts"}
    if set(record) != expected_keys:
        raise CorruptLog(f"record keys {sorted(record)} != {sorted(expected_keys)}")
    if crc != _checksum(record):
        raise CorruptLog(f"checksum mismatch on seq {record.get('seq')}")
    return Event(
        sequence_number=record["seq"],
        player_id=record["player_id"],
        kind=record["kind"],
        payload=record["payload"],
        timestamp_ms=record["ts"],
    )


class EventLog:
    """Per-player append-only logs under ``data_dir``.

    fsync-on-append is configurable; with it off, durability is the OS page
    cache's problem, which is fine for tests and simulation.
    """

    def __init__(self, data_dir: str | Path, fsync: bool = False):
        self.data_dir = Path(data_dir)
        self.events_dir = self.data_dir / "events"
        self.snapshots_dir = self.data_dir / "snapshots"
        self.fsync = fsync
        self.events_dir.mkdir(parents=True, exist_ok=True)
        self.snapshots_dir.mkdir(parents=True, exist_ok=True)
        self._lock = threading.Lock()
        self._last_seq: dict[str, int] = {}

    def _log_path(self, player_id: str) -> Path:
        return self.events_dir / f"{player_id}.log"

    def _snapshot_path(self, player_id: str) -> Path:
        return self.snapshots_dir / f"{player_id}.json"

    def players(self) -> list[str]:
        return sorted(p.stem for p in self.events_dir.glob("*.log"))

    def last_sequence(self, player_id: str) -> int:
        with self._lock:
            cached = self._last_seq.get(player_id)
        if cached is not None:
            return cached
        path = self._log_path(player_id)
        if not path.exists():
            return 0
        last = 0
        for event in self.read_events(player_id):
            last = event.sequence_number
        with self._lock:
            self._last_seq[player_id] = last
        return last

    def append(self, player_id: str, kind: str, payload: dict, timestamp_ms: int) -> Event:
        """Durably append one event and return it with its assigned sequence."""
        seq = self.last_sequence(player_id) + 1
        event = Event(
            sequence_number=seq,
            player_id=player_id,
            kind=kind,
            payload=payload,
            timestamp_ms=timestamp_ms,
        )
        line = encode_record(event) + "\n"
        try:
            with open(self._log_path(player_id), "a", encoding="utf-8") as fh:
                fh.write(line)
                fh.flush()
                if self.fsync:
                    os.fsync(fh.fileno())
        except OSError as exc:
            raise StorageFailure(str(exc)) from exc
        with self._lock:
            self._last_seq[player_id] = seq
        return event

    def read_events(self, player_id: str, after_seq: int = 0) -> list[Event]:
        """All events with sequence > after_seq, verifying checksums and order."""
        path = self._log_path(player_id)
        if not path.exists():
            raise UnknownPlayer(player_id)
        events: list[Event] = []
        previous = 0
        with open(path, encoding="utf-8") as fh:
            for line_no, line in enumerate(fh, start=1):
                line = line.rstrip("\n")
                if not line:
                    continue
                event = decode_record(line)
                if event.sequence_number != previous + 1:
                    raise CorruptLog(
                        f"{player_id} line {line_no}: sequence {event.sequence_number} after {previous}"
                    )
                if event.player_id != player_id:
                    raise CorruptLog(f"{player_id} line {line_no}: foreign player id")
                previous = event.sequence_number
                if event.sequence_number > after_seq:
                    events.append(event)
        return events

    def all_events(self) -> list[Event]:
        out: list[Event] = []
        for player_id in self.players():
            out.extend(self.read_events(player_id))
        return out

    def write_snapshot(self, player_id: str, as_of_sequence: int, state_json: str) -> None:
        doc = {"as_of_sequence": as_of_sequence, "state": state_json}
        tmp = self._snapshot_path(player_id).with_suffix(".tmp")
        try:
            tmp.write_text(json.dumps(doc, sort_keys=True), encoding="utf-8")
            tmp.replace(self._snapshot_path(player_id))
        except OSError as exc:
            raise StorageFailure(str(exc)) from exc

    def latest_snapshot(self, player_id: str) -> Optional[Snapshot]:
        path = self._snapshot_path(player_id)
        if not path.exists():
            return None
        doc = json.loads(path.read_text(encoding="utf-8"))
        return Snapshot(
            player_id=player_id,
            as_of_sequence=doc["as_of_sequence"],
            state_json=doc["state"],
        )

    def verify(self) -> dict:
        """Checksum/order audit of every player stream; never raises."""
        report: dict = {"players": {}, "ok": True}
        for player_id in self.players():
            try:
                events = self.read_events(player_id)
                report["players"][player_id] = {"ok": True, "events": len(events)}
            except CorruptLog as exc:
                report["players"][player_id] = {"ok": False, "error": str(exc)}
                report["ok"] = False
        return report
