"""Exception types shared across the package."""


class UsageError(ValueError):
    """Caller violated a documented precondition (bad index, bad shape, bad flag)."""


class FormatError(ValueError):
    """A serialized artifact is malformed.

    Carries the byte offset at which the problem was detected so corrupt
    files can be diagnosed without a hex editor.
    """

    def __init__(self, message: str, offset: int | None = None):
        if offset is not None:
            message = f"{message} (byte offset {offset})"
        super().__init__(message)
        self.offset = offset


class IntegrityError(RuntimeError):
    """An internal invariant was violated (indicates a bug, not a user error)."""
