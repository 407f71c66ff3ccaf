"""Exception hierarchy shared by every module of the package."""


class KhintchineError(Exception):
    """Base class for all package errors."""


class DomainError(KhintchineError, ValueError):
    """An argument lies outside the domain of the operation."""


class IndistinguishableError(KhintchineError, ArithmeticError):
    """Two quantities could not be separated at the maximum precision."""


class HorizonError(KhintchineError):
    """A finite horizon is too short to certify the requested quantity."""


class PreconditionError(KhintchineError):
    """A hypothesis required by a construction does not hold."""


class GateError(KhintchineError):
    """The covering gate ``K**eps > 2*M_eps`` is violated."""


class BudgetError(KhintchineError):
    """An enumeration would exceed its work budget."""


class AssertionFailure(KhintchineError, AssertionError):
    """A construction-level property failed on computed values."""
