"""Exception hierarchy shared by all modules."""


class SubordinationError(Exception):
    """Base class for every error raised by this package."""


class ParameterError(SubordinationError, ValueError):
    """A model parameter is outside its admissible range."""


class EmptyRequestError(ParameterError):
    """A sampler was asked for zero (or a negative number of) variates."""


class DomainError(SubordinationError, ValueError):
    """An argument lies outside the domain of the function."""


class GridError(SubordinationError, ValueError):
    """A time or space grid violates its invariants."""


class InsufficientHorizonError(SubordinationError, ValueError):
    """A simulated path does not reach far enough to answer the query."""


class EvaluationError(SubordinationError, ArithmeticError):
    """A series, quadrature or contour integral failed to converge."""


class RangeError(SubordinationError, OverflowError):
    """The result is not representable as a finite double."""


class AccuracyError(SubordinationError, ArithmeticError):
    """The requested operation cannot be resolved at the available accuracy."""


class DegenerateSampleError(SubordinationError, ValueError):
    """An empirical sample is constant, so a distributional test is meaningless."""
