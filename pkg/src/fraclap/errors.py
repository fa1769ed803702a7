"""Exception hierarchy shared by all engines."""


class FracLapError(ValueError):
    """Base class for every error raised by :mod:`fraclap`."""


class DomainError(FracLapError):
    """An argument lies outside the domain of the operation."""


class PreconditionError(FracLapError):
    """An engine precondition failed (wrong ``s``, point outside window, ...)."""


class DivergenceError(FracLapError):
    """A limiting procedure (epsilon or height extrapolation) did not settle."""


class AliasingError(PreconditionError):
    """Field does not decay at the edge of a periodic spectral domain."""
