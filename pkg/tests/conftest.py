"""Shared builders for the test suite."""

from __future__ import annotations

import pytest

from avatarquest.avatar import AvatarSchema, FieldSchema, default_schema
from avatarquest.challenges import BankEntry, default_bank


def make_schema(pool_sizes: list[int], schema_id: str = "test") -> AvatarSchema:
    """A minimal valid schema with the given answer-pool sizes (padded to 6 fields)."""
    sizes = list(pool_sizes)
    while len(sizes) < 6:
        sizes.append(2)
    fields = []
    for i, n in enumerate(sizes):
        fields.append(
            FieldSchema(
                field_id=f"f{i}",
                question_text=f"Question {i}?",
                answer_pool=tuple(f"answer{i}x{j}" for j in range(n)),
                image_set=tuple(f"img://{schema_id}/f{i}/{k}" for k in range(4)),
                verbal_cues=tuple(f"cue {i}.{k}" for k in range(4)),
            )
        )
    return AvatarSchema(schema_id=schema_id, fields=tuple(fields))


def make_entry(answer: str, entry_id: str = "e1") -> BankEntry:
    return BankEntry(
        entry_id=entry_id,
        answer=answer,
        image_refs=tuple(f"img://bank/{entry_id}/{k}" for k in range(4)),
        verbal_cues=tuple(f"bank cue {entry_id}.{k}" for k in range(4)),
    )


@pytest.fixture(scope="session")
def schema():
    return default_schema()


@pytest.fixture(scope="session")
def bank():
    return default_bank()
