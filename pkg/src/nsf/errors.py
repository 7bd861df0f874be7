"""Exception types raised across the toolkit."""


class NSFError(Exception):
    pass


class OutOfSupportedRange(NSFError, ValueError):
    """Primality requested above the deterministically supported bound."""


class CapacityExceeded(NSFError, ValueError):
    pass


class FactorizationFailed(NSFError, ArithmeticError):
    pass


class InvalidRange(NSFError, ValueError):
    pass


class DomainError(NSFError, ValueError):
    pass


class UnsupportedEBound(NSFError, ValueError):
    pass


class NotPrime(NSFError, ValueError):
    pass
