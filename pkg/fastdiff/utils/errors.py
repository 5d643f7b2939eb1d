"""
Exception hierarchy shared by the numerical modules and the command line.

Each class carries the process exit code the CLI returns when it escapes a run:
1 for usage and configuration problems, 2 for numerical failures and 3 for
violated invariants.
"""

from fastdiff.utils.config import EXIT_USAGE, EXIT_NUMERICAL, EXIT_INVARIANT


class FastDiffError(Exception):
    exit_code = EXIT_NUMERICAL


# usage / configuration

class RangeError(FastDiffError, ValueError):
    """A parameter lies outside its admissible range."""
    exit_code = EXIT_USAGE


class WrongRegime(FastDiffError):
    """The operation is not defined for this value of beta."""
    exit_code = EXIT_USAGE


class WrongExponent(FastDiffError):
    exit_code = EXIT_USAGE


class WrongKind(FastDiffError):
    exit_code = EXIT_USAGE


class KindMismatch(FastDiffError):
    exit_code = EXIT_USAGE


class GridMismatch(FastDiffError):
    exit_code = EXIT_USAGE


class SandwichViolation(FastDiffError):
    """Initial data escape the envelope of two self-similar solutions."""
    exit_code = EXIT_USAGE


# numerical failures

class IntegrationFailure(FastDiffError):
    pass


class NonPositive(FastDiffError):
    pass


class NewtonDivergence(FastDiffError):
    def __init__(self, message, suggested_dt=None):
        super().__init__(message)
        self.suggested_dt = suggested_dt


class PositivityLoss(FastDiffError):
    pass


class WindowTooShort(FastDiffError):
    pass


class NoDecay(FastDiffError):
    pass


class PastExtinction(FastDiffError):
    pass


class NotExtincting(FastDiffError):
    pass


# invariants

class InvariantViolation(FastDiffError):
    exit_code = EXIT_INVARIANT
