"""Exception hierarchy shared by every spdlab module."""


class SpdLabError(Exception):
    """Base class for all spdlab errors."""


class NotHermitianError(SpdLabError, ValueError):
    pass


class DomainError(SpdLabError, ValueError):
    """A value (usually an eigenvalue) fell outside a function's domain."""


class DegeneracyError(SpdLabError, ArithmeticError):
    """A matrix lost positive definiteness beyond the configured floor."""


class InvertibilityError(SpdLabError, ValueError):
    pass


class CommutationError(SpdLabError, ValueError):
    def __init__(self, message, residual=None):
        super().__init__(message)
        self.residual = residual


class RangeError(SpdLabError, OverflowError):
    """Overflow or an out-of-range parameter that would corrupt a result."""


class EigenError(SpdLabError, ArithmeticError):
    pass


class DimensionError(SpdLabError, ValueError):
    pass


class PreconditionError(SpdLabError, ValueError):
    pass


class SpecSyntaxError(SpdLabError, ValueError):
    """A norm, function or map spec string could not be parsed."""


#: errors that count as "numerical failure" rather than mathematical violation
NUMERICAL_ERRORS = (DegeneracyError, RangeError, EigenError, DomainError)
