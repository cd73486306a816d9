"""Exception hierarchy shared by the solvers and the CLI."""


class RandTeamError(Exception):
    """Base class for every error raised by this package."""


class ModelError(RandTeamError, ValueError):
    """An input model violates its invariants (bad distribution, dimension mismatch, ...)."""


class EnumerationCapError(RandTeamError):
    """Exhaustive enumeration would exceed the configured cap."""


class NumericalError(RandTeamError):
    """A numerical routine could not produce a trustworthy answer."""


class SingularSystemError(NumericalError):
    """A linear system is singular to working precision."""


class IndefiniteError(NumericalError):
    """A matrix that must be (negative/positive) definite is not.

    The offending eigenvalue is kept on the exception for diagnostics.
    """

    def __init__(self, message: str, eigenvalue: float):
        super().__init__(message)
        self.eigenvalue = eigenvalue


class GameValidationError(ModelError):
    """A zero-sum specification fails its concavity/convexity requirements."""

    def __init__(self, violations):
        self.violations = tuple(violations)
        super().__init__("invalid game: " + "; ".join(self.violations))


class ConfigError(RandTeamError):
    """An experiment configuration is malformed."""
