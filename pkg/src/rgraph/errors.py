"""Exception hierarchy.

Two families, because the CLI maps them to different exit codes:
``ValidationError`` (bad input, exit 1) and ``NumericalError`` (a
computation that cannot produce an answer, exit 2).
"""


class RGraphError(Exception):
    """Base class for all package errors."""


class ValidationError(RGraphError, ValueError):
    """Input violates a documented precondition."""


class GraphFormatError(ValidationError):
    """Malformed graph file. ``line`` is the 1-based offending line."""

    def __init__(self, message, line=None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line


class DegenerateLabelingError(ValidationError):
    """A labeling leaves some color class empty."""


class NotGraphicalError(ValidationError):
    """Degree sequence is not realizable by a simple graph."""


class NumericalError(RGraphError, ArithmeticError):
    """A numerical procedure failed to produce a valid answer."""


class MLENonexistenceError(NumericalError):
    """The maximum likelihood estimate does not exist (boundary data)."""

    def __init__(self, message, vertices=()):
        super().__init__(message)
        self.vertices = tuple(vertices)


class ConvergenceError(NumericalError):
    """Iteration cap reached. ``last`` holds the final iterate."""

    def __init__(self, message, last=None, iterations=None, residual=None):
        super().__init__(message)
        self.last = last
        self.iterations = iterations
        self.residual = residual


class FrozenChainError(NumericalError):
    """The swap meta-graph has no edges at this graph; no resampling possible."""


class FrozenChainWarning(UserWarning):
    """Swap chain started at an isolated point of the meta-graph."""


class UnstableGroupError(ValidationError):
    """A block of the partial-sum test has too little variance; use fewer blocks."""
