"""Exception hierarchy shared by every module."""

from __future__ import annotations


class UnivalenceError(Exception):
    """Base class for all errors raised by univcheck."""


class DomainError(UnivalenceError, ValueError):
    """A sample point lies outside the disk of validity of a function."""


class RepresentationError(UnivalenceError, ValueError):
    """A truncated series does not meet its tail bound."""


class ValidationError(UnivalenceError, ValueError):
    """A function or configuration violates a stated invariant."""


class ParameterError(UnivalenceError, ValueError):
    """Criterion parameters violate one or more admissibility constraints.

    ``violations`` holds the stable constraint names, in check order.
    """

    def __init__(self, violations: list[str], details: list[str] | None = None):
        self.violations = tuple(violations)
        self.details = tuple(details or violations)
        super().__init__("; ".join(f"[{n}] {d}" for n, d in zip(self.violations, self.details)))


class PointError(UnivalenceError, ArithmeticError):
    """A computation broke down at a specific point (``witness``)."""

    def __init__(self, message: str, witness: complex | None = None, t: float | None = None):
        self.witness = witness
        self.t = t
        super().__init__(message)


class SingularityError(PointError):
    """f(z)/z vanishes away from the origin."""


class InapplicableError(PointError):
    """A criterion denominator vanishes, so the inequality is undefined there."""


class BranchError(PointError):
    """A power could not be given a continuous branch along the sampling path."""


class PoleError(PointError):
    """A Möbius-type denominator vanishes."""


class DegenerateDerivativeError(PointError):
    """The holomorphic derivative of the extension is numerically zero."""


class InconclusiveError(UnivalenceError):
    """An oracle could not reach a decision."""
