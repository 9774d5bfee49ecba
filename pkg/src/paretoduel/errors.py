"""Exception hierarchy shared across the package."""


class ParetoDuelError(Exception):
    """Base class for all package errors."""


class DimensionError(ParetoDuelError, ValueError):
    """Vector/matrix shapes do not match the declared problem sizes."""


class EmptyInputError(ParetoDuelError, ValueError):
    """An operation that requires a non-empty collection received none."""


class DomainError(ParetoDuelError, ValueError):
    """A design lies outside the design space it is evaluated on."""


class ConfigError(ParetoDuelError, ValueError):
    """Invalid or inconsistent configuration values."""


class UnsupportedError(ParetoDuelError, ValueError):
    """The operation is not defined for this input class."""


class DataError(ParetoDuelError, ValueError):
    """A dataset violates the preconditions of a fitting routine."""


class CalibrationError(ParetoDuelError, RuntimeError):
    """Noise calibration could not reach the requested mistake rate."""


class FitError(ParetoDuelError, RuntimeError):
    """Model fitting failed; carries solver diagnostics."""

    def __init__(self, message, diagnostics=None):
        super().__init__(message)
        self.diagnostics = dict(diagnostics or {})


class OptimizerError(ParetoDuelError, RuntimeError):
    """The inner maximizer produced no finite value on any restart."""


class PolicyError(ParetoDuelError, RuntimeError):
    """A query-selection policy failed; carries diagnostics."""

    def __init__(self, message, diagnostics=None):
        super().__init__(message)
        self.diagnostics = dict(diagnostics or {})


class InconsistentEvidenceError(ParetoDuelError, RuntimeError):
    """A posterior update assigned zero mass to every hypothesis."""
