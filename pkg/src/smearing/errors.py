"""Exception hierarchy.

Every error raised on purpose by the library derives from ``SmearingError``
so callers (and the CLI) can separate bad input from genuine bugs.
"""


class SmearingError(Exception):
    """Base class for all library errors."""


class InputError(SmearingError, ValueError):
    """Malformed or inconsistent input data."""


class NumericalFailure(SmearingError, ArithmeticError):
    """A numerical routine could not produce a trustworthy answer."""


class NotHermitian(InputError):
    pass


class NotPSD(InputError):
    pass


class DimensionMismatch(InputError):
    pass


class UnknownOutcomeLabel(InputError, KeyError):
    def __str__(self):
        return Exception.__str__(self)


class OutcomeMismatch(InputError):
    pass


class InvalidObservable(InputError):
    pass


class NotSharp(InvalidObservable):
    pass


class InvalidKernel(InputError):
    pass


class InvalidDefaultMeasure(InputError):
    pass


class IncompletePartitionMap(InputError):
    pass


class TooLarge(InputError):
    pass


class AlreadyClean(InputError):
    pass


class InvalidParameters(InputError):
    pass


class UnknownSuite(InputError):
    pass


class NonCommutativeRange(SmearingError):
    """The range of an observable is not commutative.

    Carries the first offending pair of outcome labels and the operator norm
    of their commutator.
    """

    def __init__(self, pair, norm):
        self.pair = tuple(pair)
        self.norm = float(norm)
        super().__init__(
            f"atoms {self.pair[0]!r} and {self.pair[1]!r} do not commute "
            f"(commutator norm {self.norm:.3e})"
        )


class NumericalBreakdown(NumericalFailure):
    pass
