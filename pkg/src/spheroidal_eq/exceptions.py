"""Exception and warning types shared across the package."""


class DomainError(ValueError):
    """An argument lies outside the domain where the quantity is defined."""


class DegenerateSpheroidError(DomainError):
    """The spheroid is too close to a ball for spheroidal coordinates."""


class QuadratureError(ArithmeticError):
    """Adaptive quadrature did not reach the requested tolerance."""


class BracketError(RuntimeError):
    """No sign change was found while bracketing a root."""


class BudgetWarning(RuntimeWarning):
    """A Monte-Carlo or grid estimate exceeded its requested error budget."""


class StagnationWarning(RuntimeWarning):
    """The particle flow step size underflowed before convergence."""
