"""Shared exception types.

Exit-code mapping for the command line lives in cli.py: resource limits
map to exit code 2, invalid input to exit code 3.
"""


class DimensionError(ValueError):
    """Operands live on different qubit counts or incompatible dimensions."""


class ResourceLimitError(RuntimeError):
    """A documented size cap was exceeded (dense path, enumeration, ...)."""


class ConvergenceError(RuntimeError):
    """An iterative routine ran out of iterations.

    Carries the last residual so callers can report how close it got.
    """

    def __init__(self, message, residual=None):
        super().__init__(message)
        self.residual = residual
