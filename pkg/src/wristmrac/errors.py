"""Exception types shared across the package."""


class DomainError(ValueError):
    """An argument lies outside the domain of the model."""


class UnsupportedCaseError(ValueError):
    """The requested analytic case is not covered (e.g. overdamped systems)."""


class SimulationError(RuntimeError):
    """A time-stepping simulation produced or received non-finite values."""


class DivergenceError(SimulationError):
    """A simulation left its stability envelope.

    The records produced up to the point of failure are kept on ``partial``
    so callers can inspect what went wrong.
    """

    def __init__(self, message, partial=None):
        super().__init__(message)
        self.partial = partial


class TrainingError(RuntimeError):
    """Levenberg-Marquardt training could not continue."""


class ParseError(ValueError):
    """A file did not match its expected format."""

    def __init__(self, message, path=None, line=None):
        where = ""
        if path is not None:
            where += f"{path}"
        if line is not None:
            where += f":{line}"
        super().__init__(f"{where}: {message}" if where else message)
        self.path = path
        self.line = line


class ConfigError(ValueError):
    """Invalid or inconsistent configuration."""
