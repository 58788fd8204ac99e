"""Exception types raised across the package."""


class DomainError(ValueError):
    """An argument lies outside the domain of a function (e.g. k >= 1)."""


class StratumError(ValueError):
    """A covector was passed to an operation defined for another stratum."""


class IntegrationError(RuntimeError):
    """The adaptive integrator could not reach the requested time."""


class ConsistencyError(RuntimeError):
    """A root guaranteed by theory was not found inside its bracket.

    This points at a transcription or numerical bug, never at bad input.
    """


class AmbiguousEndpointError(ValueError):
    """The requested horizon coincides with a conjugate time."""
