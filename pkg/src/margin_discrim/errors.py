"""Exception types shared across the package."""


class DiscriminationError(Exception):
    """Base class for all errors raised by this package."""


class ValidationError(DiscriminationError):
    """An object violates one of its structural invariants."""


class DomainError(DiscriminationError):
    """An argument lies outside the mathematical domain of an operation."""


class RegimeError(DiscriminationError):
    """Inputs are valid but outside the regime where a construction applies."""


class NotRepresentableError(DiscriminationError):
    """A POVM cannot be identified with an optimal unambiguous measurement."""


class DecompositionSearchError(DiscriminationError):
    """The ancilla-assisted decomposition search exhausted its budget.

    Carries the best violation magnitudes found so the caller can judge
    how far the search got.
    """

    def __init__(self, message, violations=None):
        super().__init__(message)
        self.violations = dict(violations or {})
