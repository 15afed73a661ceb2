"""Shared exception types."""


class PreconditionError(ValueError):
    """A documented mathematical precondition of an operation is violated.

    Raised with a message quoting the measured quantity so callers can
    distinguish "the hypothesis fails" from programming errors.
    """


class InternalInconsistencyError(RuntimeError):
    """A conclusion that is guaranteed under a verified hypothesis failed.

    This signals a genuine numerical contradiction (or a bug), never bad
    user input.
    """
