"""Exception hierarchy.

Input problems derive from :class:`ValueError`; numerical breakdowns derive
from :class:`NumericalError` so callers (and the CLI exit codes) can tell
the two apart.
"""


class FamilyFormatError(ValueError):
    """Malformed family file or inconsistent matrix dimensions."""


class DimensionMismatchError(ValueError):
    pass


class AsymmetryError(ValueError):
    pass


class NumericalError(ArithmeticError):
    """Base class for failures of the numerical routines themselves."""


class ConvergenceError(NumericalError):
    """Eigensolver did not converge.

    ``trial`` and ``level`` are filled in by the joint diagonalizers when the
    failure happens inside one of their trials.
    """

    def __init__(self, reason, *, trial=None, level=None):
        self.reason = reason
        self.trial = trial
        self.level = level
        ctx = ", ".join(f"{k}={v}" for k, v in (("level", level), ("trial", trial)) if v is not None)
        super().__init__(f"{reason} ({ctx})" if ctx else reason)


class NotPositiveDefiniteError(NumericalError):
    def __init__(self, k):
        self.k = k
        super().__init__(f"conjugated matrix {k} is not positive definite")


class RankDeficiencyError(NumericalError):
    pass
