"""Exception types shared across the package."""


class PreconditionError(ValueError):
    """An operation was called on an input that violates its contract."""


class ConvergenceError(RuntimeError):
    """An iterative routine stopped before reaching its tolerance."""

    def __init__(self, message, residual=None, iterations=None):
        super().__init__(message)
        self.residual = residual
        self.iterations = iterations


class SchemaError(ValueError):
    """Serialized input does not match the expected JSON layout."""
