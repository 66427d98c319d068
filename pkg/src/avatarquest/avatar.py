"""System-generated avatar identities.

An avatar schema declares the security-question fields, each with a pool of
candidate answers, four fixed images, and four verbal cues. A profile is a
deterministic uniform draw from every pool, keyed by a 64-bit seed, so the
same (schema, seed) pair regenerates the identical identity anywhere.

Entropy accounting is exact: uniform draws make each field worth
log2(pool size) bits, and independent fields add.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from importlib import resources

from .errors import DuplicateField, InvalidSchema, UnknownField
from .rng import SplitMix64, fnv1a64, mix64

MIN_SCHEMA_FIELDS = 6
IMAGES_PER_CHALLENGE = 4


def normalize_answer(text: str) -> str:
    """Canonical form used for every answer comparison.

    Case-folds, trims, and collapses internal whitespace; accents and
    punctuation are preserved (answers are compared verbatim otherwise).
    """
    return " ".join(text.split()).casefold()


@dataclass(frozen=True)
class FieldSchema:
    field_id: str
    question_text: str
    answer_pool: tuple[str, ...]
    image_set: tuple[str, ...]
    verbal_cues: tuple[str, ...]

    def validate(self) -> None:
        if not self.field_id:
            raise InvalidSchema("field_id must be non-empty")
        if len(self.answer_pool) < 2:
            raise InvalidSchema(f"field {self.field_id!r}: answer_pool needs >= 2 entries")
        normalized = [normalize_answer(a) for a in self.answer_pool]
        if len(set(normalized)) != len(normalized):
            raise InvalidSchema(f"field {self.field_id!r}: answer_pool entries collide after normalization")
        if len(self.image_set) != IMAGES_PER_CHALLENGE:
            raise InvalidSchema(f"field {self.field_id!r}: image_set must hold exactly 4 references")
        if len(self.verbal_cues) != IMAGES_PER_CHALLENGE:
            raise InvalidSchema(f"field {self.field_id!r}: verbal_cues must hold exactly 4 strings")


@dataclass(frozen=True)
class AvatarSchema:
    schema_id: str
    fields: tuple[FieldSchema, ...]

    def validate(self) -> None:
        if not self.schema_id:
            raise InvalidSchema("schema_id must be non-empty")
        if len(self.fields) < MIN_SCHEMA_FIELDS:
            raise InvalidSchema(f"schema needs >= {MIN_SCHEMA_FIELDS} fields, got {len(self.fields)}")
        seen: set[str] = set()
        for field in self.fields:
            field.validate()
            if field.field_id in seen:
                raise InvalidSchema(f"duplicate field_id {field.field_id!r}")
            seen.add(field.field_id)

    def field(self, field_id: str) -> FieldSchema:
        for field in self.fields:
            if field.field_id == field_id:
                return field
        raise UnknownField(field_id)

    def field_ids(self) -> list[str]:
        return [field.field_id for field in self.fields]


@dataclass(frozen=True)
class AvatarProfile:
    profile_id: str
    schema_id: str
    seed: int
    assignments: dict[str, str]

    def answer_for(self, field_id: str) -> str:
        """The stored assignment, verbatim (normalization happens at judgment)."""
        try:
            return self.assignments[field_id]
        except KeyError:
            raise UnknownField(field_id) from None


def generate_profile(schema: AvatarSchema, seed: int) -> AvatarProfile:
    """Draw one answer per field, uniformly, from a seeded stream.

    Each field gets its own SplitMix64 stream seeded with
    mix64(seed, fnv1a64(field_id)), so adding or removing a field never
    perturbs the draws of the others.
    """
    schema.validate()
    assignments: dict[str, str] = {}
    for field in schema.fields:
        stream = SplitMix64(mix64(seed, fnv1a64(field.field_id)))
        assignments[field.field_id] = field.answer_pool[stream.below(len(field.answer_pool))]
    profile_id = f"{schema.schema_id}:{seed & 0xFFFFFFFFFFFFFFFF:016x}"
    return AvatarProfile(
        profile_id=profile_id,
        schema_id=schema.schema_id,
        seed=seed & 0xFFFFFFFFFFFFFFFF,
        assignments=assignments,
    )


def field_entropy(schema: AvatarSchema, field_id: str) -> float:
    """Bits contributed by one field: log2 of its pool size (uniform draw)."""
    return math.log2(len(schema.field(field_id).answer_pool))


def question_set_entropy(schema: AvatarSchema, field_ids: list[str]) -> float:
    """Summed entropy of independently drawn fields."""
    if len(set(field_ids)) != len(field_ids):
        raise DuplicateField("field_ids must be distinct")
    return sum(field_entropy(schema, fid) for fid in field_ids)


def answer_for(profile: AvatarProfile, field_id: str) -> str:
    return profile.answer_for(field_id)


# -- schema file format -------------------------------------------------------
#
# A schema file is one UTF-8 JSON document:
#   {"schema_id": "...", "fields": [{"field_id": ..., "question_text": ...,
#    "answer_pool": [...], "image_set": [4 refs], "verbal_cues": [4 strings]}]}
# Unknown keys are rejected so typos fail loudly instead of silently.

_FIELD_KEYS = {"field_id", "question_text", "answer_pool", "image_set", "verbal_cues"}
_SCHEMA_KEYS = {"schema_id", "fields"}


def parse_schema(data: dict) -> AvatarSchema:
    if not isinstance(data, dict):
        raise InvalidSchema("schema document must be a JSON object")
    unknown = set(data) - _SCHEMA_KEYS
    if unknown:
        raise InvalidSchema(f"unknown schema keys: {sorted(unknown)}")
    raw_fields = data.get("fields")
    if not isinstance(raw_fields, list):
        raise InvalidSchema("schema 'fields' must be a list")
    fields = []
    for raw in raw_fields:
        if not isinstance(raw, dict):
            raise InvalidSchema("each field must be a JSON object")
        unknown = set(raw) - _FIELD_KEYS
        if unknown:
            raise InvalidSchema(f"unknown field keys: {sorted(unknown)}")
        missing = _FIELD_KEYS - set(raw)
        if missing:
            raise InvalidSchema(f"field missing keys: {sorted(missing)}")
        fields.append(
            FieldSchema(
                field_id=raw["field_id"],
                question_text=raw["question_text"],
                answer_pool=tuple(raw["answer_pool"]),
                image_set=tuple(raw["image_set"]),
                verbal_cues=tuple(raw["verbal_cues"]),
            )
        )
    schema = AvatarSchema(schema_id=data.get("schema_id", ""), fields=tuple(fields))
    schema.validate()
    return schema


def load_schema(path: str) -> AvatarSchema:
    with open(path, encoding="utf-8") as fh:
        return parse_schema(json.load(fh))


def default_schema() -> AvatarSchema:
    """The schema shipped with the package (10 classic security-question fields)."""
    text = resources.files("avatarquest.data").joinpath("default_schema.json").read_text("utf-8")
    return parse_schema(json.loads(text))
