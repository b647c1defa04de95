"""Exception types shared across the package."""


class DomainError(ValueError):
    """An argument lies outside the domain of an operation."""


class CapacityError(RuntimeError):
    """A computation would exceed the configured photon-number cutoff."""


class SearchFailure(RuntimeError):
    """A numerical search did not reach its target."""

    def __init__(self, message, best=None):
        super().__init__(message)
        self.best = best


class DegeneratePointError(ArithmeticError):
    """The phase response has zero slope, so the sensitivity is unbounded."""
