"""Exception types shared across the package."""


class LosMimoError(Exception):
    """Base class for all errors raised by losmimo."""


class DomainError(LosMimoError, ValueError):
    """An input lies outside the domain where a formula is defined."""


class ConvergenceError(LosMimoError, ArithmeticError):
    """A numerical routine failed to converge."""

    def __init__(self, message, diagnostics=None):
        super().__init__(message)
        self.diagnostics = dict(diagnostics or {})


class ConfigError(LosMimoError, ValueError):
    """A run configuration could not be parsed or validated."""
