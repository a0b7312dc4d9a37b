"""Exception types shared across the package."""

from __future__ import annotations


class CniCloudError(Exception):
    """Base class for all cnicloud errors."""


class InvalidToken(CniCloudError):
    """A filename field contains characters outside its allowed charset."""


class MalformedName(CniCloudError):
    """A log filename does not follow the cniCloud naming convention."""


class MalformedBlock(CniCloudError):
    """A decoded log file violates the block format.

    Carries the 1-based line number where the violation was detected.
    """

    def __init__(self, lineno: int, reason: str):
        super().__init__(f"line {lineno}: {reason}")
        self.lineno = lineno
        self.reason = reason


class DuplicateFile(CniCloudError):
    """The file path has already been ingested."""


class UnknownFile(CniCloudError):
    """A message row references a file path absent from tFile."""


class IoFailure(CniCloudError):
    """An underlying filesystem operation failed."""


class StaleIndex(CniCloudError):
    """A lazy body lookup found the on-disk file changed since ingestion."""


# Query error kinds, surfaced verbatim through the CLI and the HTTP API.
BLANK_QUERY = "BlankQuery"
SYNTAX_ERROR = "SyntaxError"
UNKNOWN_TABLE = "UnknownTable"
UNKNOWN_COLUMN = "UnknownColumn"
UNSUPPORTED_FEATURE = "UnsupportedFeature"
TYPE_MISMATCH = "TypeMismatch"

QUERY_ERROR_KINDS = (
    BLANK_QUERY,
    SYNTAX_ERROR,
    UNKNOWN_TABLE,
    UNKNOWN_COLUMN,
    UNSUPPORTED_FEATURE,
    TYPE_MISMATCH,
)


class QueryError(CniCloudError):
    """A query was rejected; ``message`` is stable for identical inputs."""

    def __init__(self, kind: str, message: str, position: int | None = None):
        if kind not in QUERY_ERROR_KINDS:
            raise ValueError(f"unknown query error kind: {kind}")
        super().__init__(message)
        self.kind = kind
        self.message = message
        self.position = position
