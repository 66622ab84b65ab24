"""Exception types raised across the package."""


class SNNWError(Exception):
    """Base class for all package errors."""


class ConfigurationError(SNNWError, ValueError):
    """Invalid user-supplied configuration (bad axis, unsupported rule size, ...)."""


class UsageError(SNNWError, RuntimeError):
    """An API was called in a state where it cannot work."""


class NumericalError(SNNWError, ArithmeticError):
    """A non-finite value appeared where a finite one is required."""


class TrainingError(SNNWError, RuntimeError):
    """Training aborted. ``report`` holds the partial :class:`TrainReport`."""

    def __init__(self, message, report=None, epoch=None):
        super().__init__(message)
        self.report = report
        self.epoch = epoch


class AssemblyError(NumericalError):
    """Non-finite entry in the Galerkin matrix or right-hand side."""


class DegenerateBasisError(SNNWError, RuntimeError):
    """The Galerkin matrix is identically zero."""


class MetricError(SNNWError, ArithmeticError):
    """An error metric is undefined (e.g. zero reference norm)."""


class StageError(SNNWError, RuntimeError):
    """Wraps a failure inside an experiment pipeline with the stage it happened in."""

    def __init__(self, stage, cause):
        super().__init__(f"{stage}: {cause}")
        self.stage = stage
        self.cause = cause


class InvariantError(SNNWError, AssertionError):
    """Internal consistency check failed (e.g. jets of different dimension combined)."""
