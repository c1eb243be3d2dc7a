"""Exception and warning types raised across the package."""


class MoyalError(Exception):
    """Base class for all errors raised by :mod:`moyal`."""


class ConstructionError(MoyalError, ValueError):
    pass


class SingularThetaError(MoyalError):
    pass


class RepresentationError(MoyalError, TypeError):
    """An operation was asked to act on a symbol variant it cannot handle."""


class SpectralOrderError(MoyalError, ValueError):
    """Requested derivative order is beyond the trustworthy spectral band."""


class GridMismatchError(MoyalError, ValueError):
    pass


class NumericalError(MoyalError, ArithmeticError):
    pass


class DegenerateInputError(MoyalError, ValueError):
    pass


class DivergentSeriesError(MoyalError, ValueError):
    pass


class NormalizationError(MoyalError, ValueError):
    pass


class ConfigError(MoyalError, ValueError):
    def __init__(self, message, field=None, line=None):
        self.field = field
        self.line = line
        where = []
        if line is not None:
            where.append(f"line {line}")
        if field is not None:
            where.append(f"field {field!r}")
        if where:
            message = f"{message} ({', '.join(where)})"
        super().__init__(message)


class UsageError(MoyalError, ValueError):
    pass


class GridTooSmallWarning(UserWarning):
    """The sampling box truncates a symbol that has not decayed enough."""
