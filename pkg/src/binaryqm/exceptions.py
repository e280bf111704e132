"""Exception hierarchy.

Input problems derive from :class:`ValidationError`; numerical breakdowns
that indicate a bug or an ill-conditioned input derive from
:class:`NumericalFailure`. The CLI maps the two families to exit codes 2
and 3.
"""


class BinaryQMError(Exception):
    """Base class for all package errors."""


class ValidationError(BinaryQMError, ValueError):
    pass


class NumericalFailure(BinaryQMError, ArithmeticError):
    pass


class DimensionMismatch(ValidationError):
    pass


class NotHermitian(ValidationError):
    pass


class NotCommuting(ValidationError):
    """A family passed to :func:`joint_diagonalize` does not commute."""


class NonCommuting(ValidationError):
    """An observable lies outside the context of a physical state."""


class InvalidState(ValidationError):
    pass


class NotUnit(ValidationError):
    pass


class BadDistribution(ValidationError):
    pass


class DegenerateWeights(ValidationError):
    pass


class ParseError(ValidationError):
    def __init__(self, message, line=None, column=None):
        self.line = line
        self.column = column
        if line is not None:
            message = f"{message} (line {line}, column {column})"
        super().__init__(message)


class ConvergenceFailure(NumericalFailure):
    pass


class NoMatchingBranch(NumericalFailure):
    pass


class ZeroProbabilityBranch(NumericalFailure):
    pass
