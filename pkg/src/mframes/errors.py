"""Exception hierarchy shared by every module."""


class FrameError(Exception):
    """Base class for all errors raised by mframes."""


class ShapeError(FrameError, ValueError):
    """Operands do not share algebra shape or module rank."""


class NumericError(FrameError, ValueError):
    """Non-finite entries where finite ones are required."""


class DomainError(FrameError, ValueError):
    """An argument lies outside the domain of an operation.

    ``min_eig`` is set when the failure is a positivity violation.
    """

    def __init__(self, message, min_eig=None):
        super().__init__(message)
        self.min_eig = min_eig


class RankError(FrameError, ValueError):
    """Inversion of a rank-deficient operator; carries the smallest singular value."""

    def __init__(self, message, sigma_min=None):
        super().__init__(message)
        self.sigma_min = sigma_min


class RepresentationError(FrameError, RuntimeError):
    """A matrix could not be pulled back to cell form within tolerance."""


class ParseError(FrameError, ValueError):
    """Malformed scenario document; ``pointer`` is a JSON pointer to the offending node."""

    def __init__(self, message, pointer=""):
        super().__init__(f"{pointer or '/'}: {message}")
        self.pointer = pointer
