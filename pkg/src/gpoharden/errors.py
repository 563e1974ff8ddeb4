"""Exception hierarchy shared by every pipeline stage."""

from __future__ import annotations


class HardeningError(Exception):
    """Base class for all errors raised by gpoharden."""


class ParseError(HardeningError):
    """Input text could not be parsed.

    ``location`` is a human-readable position (``line 12``, ``offset 0x40``)
    when one is known.
    """

    def __init__(self, message: str, location: str | None = None):
        self.location = location
        if location:
            message = f"{message} ({location})"
        super().__init__(message)


class SchemaError(HardeningError):
    """Input parsed but does not have the expected structure."""


class CollisionError(HardeningError):
    """Two definitions claim the same normalized policy path."""

    def __init__(self, path: str, first: str, second: str):
        self.path = path
        self.ids = (first, second)
        super().__init__(f"policy path collision on {path!r}: {first!r} and {second!r}")


class VersionError(HardeningError):
    """Serialized document has an unexpected schema version or fingerprint."""


class NormalizeError(HardeningError):
    """Path text cannot be turned into a policy path."""


class ValueParseError(HardeningError):
    def __init__(self, message: str, raw: str):
        self.raw = raw
        super().__init__(f"{message}: {raw!r}")


class PreconditionError(HardeningError):
    pass


class ConsistencyError(HardeningError):
    pass


class ScopeError(HardeningError):
    pass


class FormatError(HardeningError):
    """Binary artifact is malformed."""

    def __init__(self, message: str, offset: int | None = None):
        self.offset = offset
        if offset is not None:
            message = f"{message} at offset {offset}"
        super().__init__(message)
