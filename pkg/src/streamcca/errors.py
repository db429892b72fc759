"""Exception hierarchy shared by every module."""


class CCAError(Exception):
    """Base class for all errors raised by streamcca."""


class InputError(CCAError, ValueError):
    """Invalid argument: wrong shape, out-of-range parameter, malformed data."""


class InfeasibleError(InputError):
    """The requested constraint set is empty."""


class NumericalError(CCAError, ArithmeticError):
    """A computation produced non-finite or otherwise unusable values."""


class SingularityError(NumericalError):
    """A matrix that must be positive definite is not."""


class DegenerateError(NumericalError):
    """A rescaling step has nothing left to rescale."""


class StreamExhaustedError(CCAError):
    """The sample stream ended before the requested number of iterations.

    Attributes
    ----------
    completed : int
        Number of iterations that did run.
    requested : int
        Number of iterations that were asked for.
    """

    def __init__(self, completed, requested):
        self.completed = completed
        self.requested = requested
        super().__init__(
            f"stream exhausted after {completed} of {requested} iterations"
        )


class DatasetFormatError(InputError):
    """A dataset or ground-truth file does not follow the text format."""

    def __init__(self, message, lineno=None):
        self.lineno = lineno
        if lineno is not None:
            message = f"line {lineno}: {message}"
        super().__init__(message)
