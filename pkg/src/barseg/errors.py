"""Exception types shared across the package."""


class InvalidInput(ValueError):
    """An argument violates a documented precondition."""


class UnsupportedFormat(ValueError):
    """An audio file is not a PCM WAV we can decode."""


class FormatError(ValueError):
    """A matrix file is malformed. Carries the byte offset of the problem."""

    def __init__(self, message: str, offset: int | None = None):
        if offset is not None:
            message = f"{message} (byte offset {offset})"
        super().__init__(message)
        self.offset = offset


class EmptyAnnotation(ValueError):
    """Every segment of an annotation was silent; nothing left to score."""


class TrackSkipped(RuntimeError):
    """A track could not be evaluated; carries the reason for the report."""

    def __init__(self, track_id: str, reason: str):
        super().__init__(f"{track_id}: {reason}")
        self.track_id = track_id
        self.reason = reason
