"""Exception hierarchy shared by every module."""


class KSampleError(Exception):
    """Base class for all errors raised by this package."""


class DimensionMismatch(KSampleError, ValueError):
    pass


class ShapeMismatch(KSampleError, ValueError):
    pass


class ParseError(KSampleError, ValueError):
    pass


class ValidationError(KSampleError, ValueError):
    """A MultiSample invariant is violated.

    ``group`` and ``row`` locate the first offending entry when known.
    """

    def __init__(self, message, group=None, row=None):
        super().__init__(message)
        self.message = message
        self.group = group
        self.row = row


class DegenerateKernelMatrix(KSampleError, ArithmeticError):
    pass


class NumericalFailure(KSampleError, ArithmeticError):
    pass


class SingularSystem(NumericalFailure):
    pass


class InvalidAlpha(KSampleError, ValueError):
    pass


class InvalidParameters(KSampleError, ValueError):
    pass
