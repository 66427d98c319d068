"""Game rounds: four pictures, one hidden word.

Standard challenges come from a bank of picture-word entries; avatar
challenges rehearse one profile field either by recall (compose the answer
from a 12-letter pool, length hidden) or by recognition (pick it from
decoy options drawn out of the same answer pool). Judging is by normalized
string equality, with a multiset spellability check for recall input.
"""

from __future__ import annotations

import json
from collections import Counter
from dataclasses import dataclass
from enum import Enum
from importlib import resources
from typing import Optional

from .avatar import AvatarProfile, AvatarSchema, normalize_answer
from .errors import (
    AnswerTooLong,
    EmptyAnswer,
    InvalidSchema,
    NoGrant,
    PoolTooSmall,
    UnknownField,
)
from .rng import SplitMix64, fnv1a64, mix64

LETTER_POOL_SIZE = 12
ALPHABET = "ABCDEFGHIJKLMNOPQRSTUVWXYZ"


class ChallengeKind(str, Enum):
    STANDARD = "standard"
    AVATAR_RECOGNITION = "avatar_recognition"
    AVATAR_RECALL = "avatar_recall"


AVATAR_KINDS = frozenset({ChallengeKind.AVATAR_RECOGNITION, ChallengeKind.AVATAR_RECALL})


class HintKind(str, Enum):
    VERBAL_CUES = "verbal_cues"
    LETTER_REVEAL = "letter_reveal"


@dataclass(frozen=True)
class Challenge:
    challenge_id: str
    kind: ChallengeKind
    image_refs: tuple[str, ...]
    answer: str
    verbal_cues: tuple[str, ...]
    show_length: bool
    letter_pool: Optional[tuple[str, ...]] = None
    options: Optional[tuple[str, ...]] = None
    field_id: Optional[str] = None


@dataclass(frozen=True)
class Verdict:
    correct: bool
    kind: ChallengeKind
    canonical_answer_revealed: bool = False
    unspellable: bool = False


@dataclass(frozen=True)
class BankEntry:
    entry_id: str
    answer: str
    image_refs: tuple[str, ...]
    verbal_cues: tuple[str, ...]

    def validate(self) -> None:
        if not self.entry_id:
            raise InvalidSchema("entry_id must be non-empty")
        if len(self.image_refs) != 4 or len(self.verbal_cues) != 4:
            raise InvalidSchema(f"entry {self.entry_id!r}: needs exactly 4 images and 4 cues")
        if not letters_of(self.answer):
            raise InvalidSchema(f"entry {self.entry_id!r}: answer has no letters")


def letters_of(text: str) -> str:
    """The answer's alphabetic characters, uppercased; pool logic sees only these."""
    return "".join(c.upper() for c in text if c.isalpha())


def build_letter_pool(answer: str, seed: int) -> tuple[str, ...]:
    """12 uppercase letters containing the answer's letters as a sub-multiset.

    Remaining slots are decoys drawn uniformly from A-Z (repeats allowed,
    including of answer letters), then the whole pool is shuffled once so
    presentation order carries no positional information. Deterministic in
    (answer, seed).
    """
    answer_letters = letters_of(answer)
    if not answer_letters:
        raise EmptyAnswer(answer)
    if len(answer_letters) > LETTER_POOL_SIZE:
        raise AnswerTooLong(f"{answer!r} has {len(answer_letters)} letters (max {LETTER_POOL_SIZE})")
    stream = SplitMix64(mix64(seed, fnv1a64("letter-pool"), fnv1a64(answer_letters)))
    pool = list(answer_letters)
    while len(pool) < LETTER_POOL_SIZE:
        pool.append(ALPHABET[stream.below(len(ALPHABET))])
    stream.shuffle(pool)
    return tuple(pool)


def spellable_from(pool: tuple[str, ...], submission: str) -> bool:
    """True when every letter of the submission fits within the pool's multiplicities."""
    need = Counter(letters_of(submission))
    have = Counter(pool)
    return all(have[letter] >= count for letter, count in need.items())


def build_standard_challenge(
    entry: BankEntry, pool_seed: int, hide_length_scope: str = "avatar"
) -> Challenge:
    """A bank puzzle: 4 pictures, 12-letter pool, answer length shown by default."""
    entry.validate()
    pool = build_letter_pool(entry.answer, pool_seed)
    return Challenge(
        challenge_id=f"std:{entry.entry_id}:{pool_seed & 0xFFFFFFFFFFFFFFFF:016x}",
        kind=ChallengeKind.STANDARD,
        image_refs=tuple(entry.image_refs),
        answer=entry.answer,
        verbal_cues=tuple(entry.verbal_cues),
        show_length=(hide_length_scope != "all"),
        letter_pool=pool,
    )


def build_avatar_challenge(
    profile: AvatarProfile,
    schema: AvatarSchema,
    field_id: str,
    mode: ChallengeKind,
    seed: int,
    option_count: int = 4,
) -> Challenge:
    """A rehearsal round for one profile field, in recall or recognition mode.

    Images and cues always come from the field's schema entry in schema
    order, and the answer length is never shown for avatar rounds.
    """
    if mode not in AVATAR_KINDS:
        raise ValueError(f"mode must be an avatar kind, got {mode}")
    field = schema.field(field_id)
    answer = profile.answer_for(field_id)

    letter_pool = None
    options = None
    if mode is ChallengeKind.AVATAR_RECALL:
        letter_pool = build_letter_pool(answer, seed)
        tag = "rcl"
    else:
        if len(field.answer_pool) < option_count:
            raise PoolTooSmall(
                f"field {field_id!r}: pool of {len(field.answer_pool)} cannot fill {option_count} options"
            )
        stream = SplitMix64(mix64(seed, fnv1a64("options"), fnv1a64(field_id)))
        answer_norm = normalize_answer(answer)
        decoys = [a for a in field.answer_pool if normalize_answer(a) != answer_norm]
        chosen = stream.sample(decoys, option_count - 1)
        chosen.append(answer)
        stream.shuffle(chosen)
        options = tuple(chosen)
        tag = "rcg"

    return Challenge(
        challenge_id=f"av:{field_id}:{tag}:{seed & 0xFFFFFFFFFFFFFFFF:016x}",
        kind=mode,
        image_refs=tuple(field.image_set),
        answer=answer,
        verbal_cues=tuple(field.verbal_cues),
        show_length=False,
        letter_pool=letter_pool,
        options=options,
        field_id=field_id,
    )


def check_answer(challenge: Challenge, submission: str) -> Verdict:
    """Judge a submission. Pure: same inputs always yield the same verdict.

    Recall submissions must also be spellable from the letter pool; ones
    that are not are judged incorrect and flagged so the UI can say why.
    """
    if challenge.kind is ChallengeKind.AVATAR_RECALL and challenge.letter_pool is not None:
        if not spellable_from(challenge.letter_pool, submission):
            return Verdict(correct=False, kind=challenge.kind, unspellable=True)
    correct = normalize_answer(submission) == normalize_answer(challenge.answer)
    return Verdict(correct=correct, kind=challenge.kind)


def verbal_cues_for(challenge: Challenge, grant) -> tuple[str, ...]:
    """The four cue strings in image order, released only against a cue grant."""
    if (
        grant is None
        or getattr(grant, "challenge_id", None) != challenge.challenge_id
        or getattr(grant, "kind", None) != HintKind.VERBAL_CUES
    ):
        raise NoGrant(challenge.challenge_id)
    return tuple(challenge.verbal_cues)


# -- client serialization ------------------------------------------------------
#
# What the client sees, field by field:
#   challenge_id  str
#   kind          "standard" | "avatar_recognition" | "avatar_recall"
#   image_refs    4 refs, server order (render order must match)
#   letter_pool   12 letters, server order (standard and recall only)
#   options       answer plus decoys, server order (recognition only)
#   answer_length int, present only when show_length is true (never for
#                 avatar kinds)
#   cues          4 strings, image order, present only once granted
# The answer itself is never serialized.


def client_view(challenge: Challenge, cues: Optional[tuple[str, ...]] = None) -> dict:
    view: dict = {
        "challenge_id": challenge.challenge_id,
        "kind": challenge.kind.value,
        "image_refs": list(challenge.image_refs),
    }
    if challenge.letter_pool is not None:
        view["letter_pool"] = list(challenge.letter_pool)
    if challenge.options is not None:
        view["options"] = list(challenge.options)
    if challenge.show_length and challenge.kind not in AVATAR_KINDS:
        view["answer_length"] = len(letters_of(challenge.answer))
    if cues is not None:
        view["cues"] = list(cues)
    return view


def serialize_client_view(challenge: Challenge, cues: Optional[tuple[str, ...]] = None) -> str:
    """Canonical JSON of the client view; identical bytes on every call."""
    return json.dumps(client_view(challenge, cues), sort_keys=True, separators=(",", ":"))


# -- challenge bank file -------------------------------------------------------
#
# One UTF-8 JSON document: {"bank_id": "...", "entries": [BankEntry...]}.

_ENTRY_KEYS = {"entry_id", "answer", "image_refs", "verbal_cues"}


def parse_bank(data: dict) -> list[BankEntry]:
    if not isinstance(data, dict) or set(data) - {"bank_id", "entries"}:
        raise InvalidSchema("bank document must be an object with bank_id and entries")
    entries = []
    seen: set[str] = set()
    for raw in data.get("entries", []):
        unknown = set(raw) - _ENTRY_KEYS
        if unknown:
            raise InvalidSchema(f"unknown bank entry keys: {sorted(unknown)}")
        entry = BankEntry(
            entry_id=raw["entry_id"],
            answer=raw["answer"],
            image_refs=tuple(raw["image_refs"]),
            verbal_cues=tuple(raw["verbal_cues"]),
        )
        entry.validate()
        if entry.entry_id in seen:
            raise InvalidSchema(f"duplicate entry_id {entry.entry_id!r}")
        seen.add(entry.entry_id)
        entries.append(entry)
    if not entries:
        raise InvalidSchema("bank has no entries")
    return entries


def load_bank(path: str) -> list[BankEntry]:
    with open(path, encoding="utf-8") as fh:
        return parse_bank(json.load(fh))


def default_bank() -> list[BankEntry]:
    text = resources.files("avatarquest.data").joinpath("challenge_bank.json").read_text("utf-8")
    return parse_bank(json.loads(text))


def entry_by_id(bank: list[BankEntry], entry_id: str) -> BankEntry:
    for entry in bank:
        if entry.entry_id == entry_id:
            return entry
    raise UnknownField(entry_id)
