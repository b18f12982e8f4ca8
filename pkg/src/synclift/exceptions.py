"""Exception hierarchy shared by all modules."""


class SyncLiftError(Exception):
    """Base class for errors raised by synclift."""


class NonHermitianInput(SyncLiftError, ValueError):
    pass


class NumericalFailure(SyncLiftError, ArithmeticError):
    pass


class DimensionMismatch(SyncLiftError, ValueError):
    pass


class NotPositiveContraction(SyncLiftError, ValueError):
    pass


class InvalidFunctionRange(SyncLiftError, ValueError):
    pass


class AnswerCountExceedsDim(SyncLiftError, ValueError):
    pass


class BlockLeakage(SyncLiftError, ValueError):
    """Operator has mass outside the block-diagonal support of a trace."""


class PadLastNotProjection(SyncLiftError, ArithmeticError):
    pass


class RemainderTooNegative(SyncLiftError, ValueError):
    pass


class EmptySequence(SyncLiftError, ValueError):
    pass


class InvalidRep(SyncLiftError, ValueError):
    pass


class ShapeMismatch(SyncLiftError, ValueError):
    pass


class SearchSpaceTooLarge(SyncLiftError, ValueError):
    pass


class MalformedInput(SyncLiftError, ValueError):
    """A file could not be parsed into the expected schema."""
