"""Exception types shared across the engine, service, and CLI."""


class WriterIntegrityError(Exception):
    """Base class for all errors raised by this package."""


class DocumentTooLargeError(WriterIntegrityError):
    """Word-diff table would exceed the configured cell cap."""


class MalformedChangeSetError(WriterIntegrityError):
    """A change set cannot be applied to the given text."""


class StaleEventError(WriterIntegrityError):
    """An edit event arrived with a timestamp before the session's last event."""


class RejectedEventError(WriterIntegrityError):
    """An edit event violates its own invariants (e.g. paste payload missing)."""


class MalformedEventError(WriterIntegrityError):
    """An event wire object or replay file could not be parsed."""


class LogParseError(WriterIntegrityError):
    """A rendered log line could not be parsed."""

    def __init__(self, message: str, line_number: int):
        super().__init__(f"line {line_number}: {message}")
        self.line_number = line_number


class ValidationError(WriterIntegrityError):
    """A store-level input failed validation (e.g. empty document name)."""


class NotFoundError(WriterIntegrityError):
    """The requested document or certificate does not exist."""


class InvalidIdError(WriterIntegrityError):
    """The supplied certificate id is not UUIDv4-shaped."""


class NothingToCertifyError(WriterIntegrityError):
    """Save was requested but no events were recorded since the last save."""


class StorageError(WriterIntegrityError):
    """A persistence operation failed."""
