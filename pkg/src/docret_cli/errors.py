"""Error types shared by the indexing modules and the CLI."""
from __future__ import annotations

EXIT_USAGE = 1
EXIT_DATA = 2


class DocretError(Exception):
    """Base class; `exit_code` is what the CLI returns when this escapes."""

    exit_code = EXIT_DATA


class UsageError(DocretError):
    exit_code = EXIT_USAGE


class DataError(DocretError):
    exit_code = EXIT_DATA


class EmptyCollection(DataError):
    def __init__(self) -> None:
        super().__init__("Collection must contain at least one document.")


class ForbiddenByte(DataError):
    """A terminator byte (0x00) where it is not allowed. Positions are 1-based."""

    def __init__(self, doc: int, offset: int) -> None:
        self.doc = doc
        self.offset = offset
        super().__init__(f"Forbidden byte 0x00 in document {doc} at offset {offset}.")


class OutOfBounds(DataError, IndexError):
    pass


class EmptyArray(DataError):
    pass


class ContractViolation(DataError):
    pass


class EmptyInput(DataError):
    pass


class MalformedGrammar(DataError):
    pass


class MalformedInput(DataError):
    pass


class NotMonotone(DataError):
    pass


class InvalidParams(UsageError):
    pass


class WrongMode(UsageError):
    pass


class MissingFreqs(UsageError):
    pass


class EmptyDistribution(DataError):
    pass


class SourceTooShort(DataError):
    pass


class PatternLengthExceedsDocs(DataError):
    pass


class FormatError(DataError):
    pass


def check_range(sp: int, ep: int, n: int) -> None:
    """Validate a 1-based inclusive rank range."""
    if not (1 <= sp <= ep <= n):
        raise OutOfBounds(f"Range [{sp},{ep}] outside [1,{n}].")
