"""Exception hierarchy shared by all quatdyn modules."""


class QuatDynError(Exception):
    """Base class for every error raised by quatdyn."""


class DivisionByZero(QuatDynError, ZeroDivisionError):
    pass


class NonSquare(QuatDynError, ValueError):
    pass


class DimensionMismatch(QuatDynError, ValueError):
    pass


class Singular(QuatDynError, ValueError):
    pass


class ZeroMatrix(QuatDynError, ValueError):
    pass


class UnknownEigenvalue(QuatDynError, ValueError):
    pass


class WrongType(QuatDynError, ValueError):
    pass


class PowerOverflowGuard(QuatDynError, ArithmeticError):
    pass


class IllConditioned(QuatDynError, ArithmeticError):
    """A numerical rank or cluster decision could not be made at the given tolerance.

    ``gap`` carries the offending singular values (or projector norm) so the
    caller can see how close the decision was.
    """

    def __init__(self, message, gap=None):
        super().__init__(message)
        self.gap = gap


class Unstable(QuatDynError, ArithmeticError):
    """The crushed-subspace dimension did not settle over the power ladder."""

    def __init__(self, message, dims=()):
        super().__init__(message)
        self.dims = list(dims)


class ParseError(QuatDynError, ValueError):
    pass
