"""Exception types shared by the solver modules."""


class KhovanskiiError(Exception):
    """Base class for all errors raised by this package."""


class DomainError(KhovanskiiError, ValueError):
    """An input lies outside the domain where an operation is defined."""


class ParameterOutOfRange(DomainError):
    """A free parameter violates the bound that guarantees convergence."""

    def __init__(self, message, *, bound=None):
        super().__init__(message)
        self.bound = bound


class UnsupportedRegime(DomainError):
    """A cubic falls outside p > 0, q > 0, 27q^2 - 4p^3 > 0."""

    def __init__(self, message, *, P=None, Q=None):
        super().__init__(message)
        self.P = P
        self.Q = Q


class UnresolvedComparison(KhovanskiiError, ArithmeticError):
    """Adaptive precision hit its cap before the comparison separated."""

    def __init__(self, message, *, bits=None):
        super().__init__(message)
        self.bits = bits


class VerificationFailure(KhovanskiiError):
    """A numerical verification did not hold; ``details`` carries the values."""

    def __init__(self, message, *, details=None):
        super().__init__(message)
        self.details = details or {}
