"""Exception hierarchy shared by the solver, oracle, simulation and CLI."""


class MappingError(Exception):
    """Base class for every error raised by this package."""


class DomainError(MappingError, ValueError):
    """An output power lies outside the domain where the PA model is defined."""


class ConfigurationError(MappingError, ValueError):
    """Model parameters or solver settings are inconsistent."""


class InfeasibleInstanceError(MappingError, ValueError):
    """No carrier-to-PA mapping can satisfy the capacity constraints."""


class InfeasibleMappingError(MappingError, ValueError):
    """A mapping violates the binary, capacity or one-PA-per-carrier constraints."""

    def __init__(self, message, violations=()):
        super().__init__(message)
        self.violations = tuple(violations)


class OverloadError(MappingError, ValueError):
    """Some PA would have to carry more than its maximum output power."""


class DegenerateProblemError(MappingError, ValueError):
    """The reduced problem has no active carriers."""


class ResourceLimitError(MappingError, RuntimeError):
    """An exhaustive enumeration would exceed the configured size guard."""


class ConfigParseError(MappingError, ValueError):
    """A run configuration file could not be parsed."""

    def __init__(self, message, line=None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line
