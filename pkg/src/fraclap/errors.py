"""Exception types raised by fraclap."""


class FracLapError(Exception):
    """Base class for all library errors."""


class ConfigurationError(FracLapError, ValueError):
    """Inconsistent or unsupported construction parameters."""


class DimensionError(FracLapError, ValueError):
    """Fields, grids or operators whose shapes do not fit together."""


class DomainError(FracLapError, ValueError):
    """Argument outside the domain of a mathematical function."""


class DivergenceError(FracLapError, ValueError):
    """A requested lattice sum does not converge."""


class SizeError(FracLapError, ValueError):
    """Problem too large for a dense code path."""


class DegenerateReferenceError(FracLapError, ZeroDivisionError):
    """Relative error requested against a zero reference."""


class FitError(FracLapError, ValueError):
    """Not enough (or invalid) data for a rate fit."""


class ConsistencyError(FracLapError, RuntimeError):
    """An internal invariant failed; results cannot be trusted."""


class BreakdownError(FracLapError, RuntimeError):
    """Conjugate gradients met a non-positive curvature direction."""

    def __init__(self, message, iteration):
        super().__init__(message)
        self.iteration = iteration


class StepError(FracLapError, RuntimeError):
    """A time step failed to converge; carries the solver report."""

    def __init__(self, message, report, step=None, partial=None):
        super().__init__(message)
        self.report = report
        self.step = step
        self.partial = partial
