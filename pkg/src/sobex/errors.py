"""Exception taxonomy shared by all modules (mapped to CLI exit codes)."""


class ValidationError(ValueError):
    """Structurally invalid input: bad polygon, bad config, violated precondition."""


class NumericalError(RuntimeError):
    """A numerical procedure failed to converge or produced an unusable value."""


class InconclusiveError(RuntimeError):
    """A verdict was requested as an assertion but the computation is inconclusive."""
