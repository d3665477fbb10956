"""Exception hierarchy shared by all modules."""


class MPDError(Exception):
    """Base class for every error raised by this package."""


class NumericalError(MPDError):
    """A numerical procedure could not produce a valid result."""


class NotPositiveDefinite(NumericalError):
    pass


class DimensionMismatch(MPDError, ValueError):
    pass


class DegenerateWeights(NumericalError):
    """All exponential observation weights underflowed to zero."""


class SingularScatter(NumericalError):
    """A (weighted) scatter matrix failed the positive-definiteness check."""


class InfeasibleKKT(NumericalError):
    """The active-set solver terminated on a point violating the KKT conditions.

    This signals a defect in the solver rather than bad user input.
    """


class TargetBelowMinimumVariance(NumericalError):
    pass


class BisectionRangeExhausted(NumericalError):
    pass


class DataError(MPDError):
    """Problems with user-supplied data files."""


class ParseError(DataError):
    pass


class NonFiniteValue(DataError):
    pass


class TooFewRows(DataError):
    pass
