"""Exception types raised by gmspheres."""


class GMError(Exception):
    """Base class for all library errors."""


class PreconditionError(GMError, ValueError):
    """An input violates a documented precondition (e.g. non-unit vector)."""


class DomainError(GMError, ValueError):
    """A formula is evaluated outside its domain of definition."""


class MembershipError(PreconditionError):
    """A point does not lie on the manifold it claims to lie on."""


class RegularValueError(GMError, ValueError):
    """A degree computation was asked for at a non-regular value."""


class ConvergenceError(GMError, ArithmeticError):
    """An iterative solve failed to converge."""

    def __init__(self, message, iterations=None):
        super().__init__(message)
        self.iterations = iterations
