"""Exception types shared across the package."""


class DimensionError(ValueError):
    """Matrix or vector has the wrong shape for the requested operation."""


class DomainError(ValueError):
    """A physical parameter lies outside its allowed range."""


class UnphysicalStateError(ValueError):
    """Covariance matrix violates the uncertainty relation."""


class BathKindError(ValueError):
    """Operation is not defined for the given bath kind."""


class ConvergenceError(RuntimeError):
    """An iterative solver failed to converge."""


class TruncationError(RuntimeError):
    """Fock-space truncation no longer has enough headroom.

    Attributes:
        time: evolution time at which the violation was detected.
        population: population of the offending top Fock level(s).
    """

    def __init__(self, message, time, population):
        super().__init__(message)
        self.time = time
        self.population = population
