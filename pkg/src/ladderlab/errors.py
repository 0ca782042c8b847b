"""Exception taxonomy shared by all ladderlab modules.

The CLI maps these onto exit codes: usage/domain/precondition problems
exit with 2, failed verification assertions with 1, I/O trouble with 3.
"""

from __future__ import annotations


class LadderlabError(Exception):
    """Base class for all errors raised by this package."""


class DomainError(LadderlabError, ValueError):
    """An argument lies outside the mathematical domain of the operation.

    When the domain edge is a computed quantity (the ladder start T0),
    it is carried on the exception.
    """

    def __init__(self, message: str, *, t0: float | None = None):
        super().__init__(message)
        self.t0 = t0


class RangeError(LadderlabError, ValueError):
    """A query exceeds the range covered by a table or cache.

    Carries enough context to tell the caller how to extend coverage.
    """

    def __init__(self, message: str, *, limit: float | None = None):
        super().__init__(message)
        self.limit = limit


class PreconditionError(LadderlabError, ValueError):
    """A documented operation precondition is violated."""


class StateError(LadderlabError, RuntimeError):
    """Required state (for example a fitted constant) is missing."""


class BracketError(LadderlabError, RuntimeError):
    """A root bracket failed; reports the residuals at both endpoints."""

    def __init__(self, message: str, *, lo: float, hi: float,
                 f_lo: float, f_hi: float):
        super().__init__(
            f"{message}: f({lo!r})={f_lo!r}, f({hi!r})={f_hi!r}")
        self.lo = lo
        self.hi = hi
        self.f_lo = f_lo
        self.f_hi = f_hi
