"""Exception types shared across the package.

``ArgumentError`` is used instead of a bare ``ValueError`` so callers can
distinguish input validation failures (CLI exit code 2) from numerical
failures (exit code 3).
"""


class ArgumentError(ValueError):
    """Raised when an input violates a documented precondition."""


class SingularOperatorError(RuntimeError):
    """Raised when a matrix fails the invertibility gate.

    Carries ``sigma_min`` and ``sigma_max`` so callers can report the
    offending singular values.
    """

    def __init__(self, msg, sigma_min=None, sigma_max=None):
        super().__init__(msg)
        self.sigma_min = sigma_min
        self.sigma_max = sigma_max


class PrecisionError(RuntimeError):
    """Raised when an iterative routine cannot certify the requested tolerance.

    The best bracket found so far is attached so partial results are not lost.
    """

    def __init__(self, msg, bracket=None):
        super().__init__(msg)
        self.bracket = bracket
