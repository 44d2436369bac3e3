"""Exception types raised by the numerical operations."""


class CMCError(Exception):
    """Base class for all errors raised by this package."""


class NotQuaternionic(CMCError, ValueError):
    pass


class NotImaginary(CMCError, ValueError):
    pass


class ZeroVector(CMCError, ValueError):
    pass


class BadIndex(CMCError, ValueError):
    pass


class DegenerateImmersion(CMCError, ValueError):
    pass


class BranchPoint(DegenerateImmersion):
    pass


class TypeViolation(CMCError, ValueError):
    pass


class LambdaZero(CMCError, ValueError):
    pass


class SingularFrame(CMCError, ValueError):
    pass


class NotUnitCircle(CMCError, ValueError):
    pass


class MuForbidden(CMCError, ValueError):
    pass


class ZeroSection(CMCError, ValueError):
    pass


class ZeroH(CMCError, ValueError):
    pass


class PoleAt(CMCError, ValueError):
    pass


class SingularTransform(CMCError, ArithmeticError):
    pass


class ConfigError(CMCError, ValueError):
    """Invalid experiment configuration; ``field`` names the offending key."""

    def __init__(self, message, field=None):
        self.field = field
        if field is not None:
            message = f"{field}: {message}"
        super().__init__(message)
