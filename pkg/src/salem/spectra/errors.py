"""Error vocabulary shared by every module."""

from __future__ import annotations


class SpectraError(ValueError):
    """Base class; subclasses ValueError so plain validation handlers still apply."""


class EndpointIsRoot(SpectraError):
    """A Sturm count was requested on an interval whose endpoint is a root."""


class QuadratureUnstable(SpectraError):
    """Successive quadrature refinements disagreed beyond tolerance."""


class BudgetExceeded(SpectraError):
    """An enumeration would visit more candidates than the configured cap."""

    def __init__(self, size: int, budget: int) -> None:
        super().__init__(f"search space of {size} candidates exceeds budget {budget}")
        self.size = size
        self.budget = budget

    def __reduce__(self) -> tuple[type[BudgetExceeded], tuple[int, int]]:
        return (type(self), (self.size, self.budget))


class NonIntegerCharPoly(SpectraError):
    """The characteristic polynomial of an isometry has a non-integer coefficient."""


class NotAnIsometry(SpectraError):
    """A matrix does not preserve the quadratic form it was paired with."""


class Degenerate(SpectraError):
    """A quadratic form has vanishing determinant."""


class DomainError(SpectraError):
    """Arguments fall outside the range where a formula is stated."""
