"""Exception types shared across the package."""


class QRCLabError(Exception):
    """Base class for all qrclab errors."""


class ShapeError(QRCLabError, ValueError):
    """Operands have incompatible shapes or dimensions."""


class SizeError(QRCLabError, ValueError):
    """A requested object would exceed the configured size limits."""


class ValidationError(QRCLabError, ValueError):
    """An input violates a documented precondition."""


class NumericError(QRCLabError, ArithmeticError):
    """A numerical routine diverged, failed to converge, or produced
    values outside its guaranteed accuracy."""
