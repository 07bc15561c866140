"""Exception types shared across the pipeline.

Anything deriving from :class:`ValidationError` is a user-input problem and
maps to CLI exit code 1; everything else is treated as an internal error.
"""


class ValidationError(ValueError):
    """Bad input data or configuration."""


class MalformedRow(ValidationError):
    def __init__(self, line, reason=""):
        self.line = line
        msg = f"malformed row at line {line}"
        if reason:
            msg += f": {reason}"
        super().__init__(msg)


class BadDate(ValidationError):
    def __init__(self, line, value):
        self.line = line
        self.value = value
        super().__init__(f"bad date {value!r} at line {line} (expected YYYY-MM-DD)")


class MissingHeader(ValidationError):
    def __init__(self, missing):
        self.missing = tuple(missing)
        super().__init__(f"missing header column(s): {', '.join(self.missing)}")


class EmptyToken(ValidationError):
    pass


class TokenContainsWhitespace(ValidationError):
    pass


class NonPositiveDf(ValidationError):
    pass


class NonFiniteT(ValidationError):
    pass


class LengthMismatch(ValidationError):
    pass


class TooFewGroups(ValidationError):
    pass


class NonPositivePopulation(ValidationError):
    pass


class GroupSizeZero(ValidationError):
    pass


class InvalidPrevalence(ValidationError):
    pass


class InvalidMultiplier(ValidationError):
    pass


class UnknownKey(KeyError):
    """A key was requested that the vocabulary does not hold (a bug, not bad input)."""


class VocabularyMismatch(RuntimeError):
    """Before/after matrices were built over different vocabularies or groupings."""
