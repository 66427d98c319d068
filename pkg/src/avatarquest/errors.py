"""Exception types shared across the package."""


class AvatarQuestError(Exception):
    """Base class for every domain error raised by this package."""


class InvalidSchema(AvatarQuestError):
    """Avatar schema violates its invariants (pool too small, duplicate ids, ...)."""


class UnknownField(AvatarQuestError):
    """A field id does not exist in the schema or profile."""


class DuplicateField(AvatarQuestError):
    """A field id was given more than once where distinct ids are required."""


class EmptyAnswer(AvatarQuestError):
    """An answer contains no letters, so no letter pool can be built."""


class AnswerTooLong(AvatarQuestError):
    """An answer has more letters than fit in the 12-letter pool."""


class PoolTooSmall(AvatarQuestError):
    """A recognition challenge needs more options than the answer pool holds."""


class NoGrant(AvatarQuestError):
    """Verbal cues were requested without a matching hint grant."""


class InsufficientPoints(AvatarQuestError):
    """The player's balance does not cover the hint cost."""


class DuplicateGrant(AvatarQuestError):
    """A hint of this kind was already granted for this challenge."""


class UnknownSession(AvatarQuestError):
    """A session id was never issued to this player."""


class UnknownChallenge(AvatarQuestError):
    """A challenge id is not open for this player."""


class EntropyUnattainable(AvatarQuestError):
    """No question subset reaches the policy's entropy floor."""


class SessionUnknown(AvatarQuestError):
    """A password-reset session token is missing or expired."""


class UnknownPlayer(AvatarQuestError):
    """No events exist for this player id."""


class CorruptLog(AvatarQuestError):
    """An event record failed its checksum or ordering check."""


class StorageFailure(AvatarQuestError):
    """The underlying storage refused an append."""


class InvalidConfig(AvatarQuestError):
    """A configuration value is outside its allowed range."""
