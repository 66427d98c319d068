"""Tunable game parameters.

Point rewards and hint costs are fixed by design (see progression); this
module holds only the knobs the design leaves open: daily quota, session
length, recognition/recall mix, and the stage-advance thresholds. The
simulation lab sweeps these.
"""

from __future__ import annotations

from dataclasses import asdict, dataclass, fields

from .errors import InvalidConfig

HIDE_LENGTH_SCOPES = ("avatar", "all")


@dataclass(frozen=True)
class GameConfig:
    daily_quota: int = 6
    session_length: int = 10
    early_recognition_fraction: float = 0.8
    late_recognition_fraction: float = 0.2
    days_threshold: int = 7
    skill_threshold: float = 0.8
    skill_window: int = 20
    option_count: int = 4
    hide_length_scope: str = "avatar"
    timezone: str = "UTC"

    def __post_init__(self):
        if self.daily_quota < 0:
            raise InvalidConfig("daily_quota must be >= 0")
        if self.session_length < 1:
            raise InvalidConfig("session_length must be >= 1")
        for name in ("early_recognition_fraction", "late_recognition_fraction"):
            value = getattr(self, name)
            if not 0.0 <= value <= 1.0:
                raise InvalidConfig(f"{name} must be in [0, 1]")
        if self.days_threshold < 1:
            raise InvalidConfig("days_threshold must be >= 1")
        if not 0.0 < self.skill_threshold <= 1.0:
            raise InvalidConfig("skill_threshold must be in (0, 1]")
        if self.skill_window < 1:
            raise InvalidConfig("skill_window must be >= 1")
        if not 2 <= self.option_count <= 8:
            raise InvalidConfig("option_count must be between 2 and 8")
        if self.hide_length_scope not in HIDE_LENGTH_SCOPES:
            raise InvalidConfig(f"hide_length_scope must be one of {HIDE_LENGTH_SCOPES}")

    def to_dict(self) -> dict:
        return asdict(self)


def config_from_dict(data: dict) -> GameConfig:
    """Build a GameConfig from parsed JSON, rejecting unknown keys."""
    known = {f.name for f in fields(GameConfig)}
    unknown = set(data) - known
    if unknown:
        raise InvalidConfig(f"unknown config keys: {sorted(unknown)}")
    return GameConfig(**data)
