"""Exception hierarchy for the admui package."""


class PIDError(Exception):
    """Base class for all errors raised by admui."""


class NegativeMass(PIDError, ValueError):
    pass


class NotNormalized(PIDError, ValueError):
    pass


class DimensionMismatch(PIDError, ValueError):
    pass


class ZeroConditioningEvent(PIDError, ValueError):
    """Conditioning on a symbol of probability zero."""


class DegenerateIterate(PIDError, ArithmeticError):
    """A scaling iterate lost all mass on a row or column whose target is positive."""


class InconsistentMarginals(PIDError, ValueError):
    """The S-marginals of the two pairwise tables disagree."""


class DimensionTooLarge(PIDError, ValueError):
    pass


class EmptyAfterFiltering(PIDError, ValueError):
    pass


class UnknownColumn(PIDError, KeyError):
    pass


class UnparseableNumeric(PIDError, ValueError):
    pass


class MalformedFile(PIDError, ValueError):
    def __init__(self, message, line=None, position=None):
        self.line = line
        self.position = position
        where = ""
        if line is not None:
            where = f" (line {line}" + (f", field {position}" if position is not None else "") + ")"
        super().__init__(message + where)


class VanishingIterateWarning(RuntimeWarning):
    """The rigorous certificate is unavailable because an iterate entry underflowed."""


class CapReachedWarning(RuntimeWarning):
    pass
