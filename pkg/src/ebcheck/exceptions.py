"""Exception hierarchy.

Every error raised on purpose by the toolkit derives from :class:`EBError`, so
callers (and the CLI) can tell analysis failures apart from programming bugs.
"""


class EBError(Exception):
    """Base class for toolkit errors."""


class DimensionMismatch(EBError, ValueError):
    pass


class EmptySet(EBError):
    pass


class PointNotInSet(EBError):
    pass


class UnsupportedStructure(EBError):
    pass


class NotDifferentiableHere(EBError):
    pass


class SurjectivityFailure(EBError):
    pass


class NonUniqueProjection(EBError):
    pass


class UnboundedBody(EBError):
    pass


class PointNotInEpigraph(EBError):
    pass


class PointInSolutionSet(EBError):
    pass


class PointNotInSolutionSet(EBError):
    pass


class InfeasibleSystem(EBError):
    pass


class SizeLimitExceeded(EBError):
    pass


class OriginNotInBody(EBError):
    pass


class NonConvexLimitingBody(EBError):
    pass


class BoundaryConditionFailure(EBError):
    pass


class NewtonDivergence(EBError):
    pass


class ProblemParseError(EBError):
    """Raised by the problem-file parser; carries the 1-based position."""

    def __init__(self, message, line=None, column=None):
        self.line = line
        self.column = column
        where = ""
        if line is not None:
            where = f"line {line}"
            if column is not None:
                where += f", column {column}"
            where += ": "
        super().__init__(where + message)
