# errors.py
"""Exception hierarchy shared by the library modules and the CLI."""


class DirsparseError(Exception):
    """Base class for every error raised by dirsparse."""


class DomainError(DirsparseError, ValueError):
    """An argument lies outside the domain of the operation."""


class ConvergenceError(DirsparseError, ArithmeticError):
    """An iterative evaluation or root finder did not converge."""


class PreconditionError(DirsparseError, ValueError):
    """A bound was used although its preconditions are not met."""


class RecordMismatchError(DirsparseError, ValueError):
    """Trial records were drawn from a different (n, alpha) than the event."""


class TrialError(DirsparseError, RuntimeError):
    """A single simulation trial failed; the message names (n, t)."""
