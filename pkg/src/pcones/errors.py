"""Exception hierarchy shared by all pcones modules."""


class PConeError(ValueError):
    """Base class for every error raised by pcones."""


class ZeroVectorError(PConeError):
    pass


class UnsupportedExponentError(PConeError):
    pass


class NotTwiceDifferentiableError(PConeError):
    pass


class PreconditionError(PConeError):
    pass


class NotPolyhedralError(PConeError):
    pass


class DimensionMismatchError(PConeError):
    pass


class NotInteriorError(PConeError):
    pass


class NotOnTargetGraphError(PConeError):
    pass


class SingularMapError(PConeError):
    pass


class ConvergenceError(PConeError):
    """Raised when an iterative routine exhausts its iteration cap.

    The ``diagnostics`` dict carries the iteration count and the final
    residual so callers can report them.
    """

    def __init__(self, message, diagnostics=None):
        super().__init__(message)
        self.diagnostics = dict(diagnostics or {})
