"""
Exception hierarchy for the Sitnikov toolkit.

Precondition failures are ``ValueError`` subclasses so that callers validating
user input can catch them uniformly; failures of the numerics themselves are
``RuntimeError`` subclasses.
"""

from typing import Any, List, Optional


class SitnikovError(Exception):
    """Base class for all errors raised by the toolkit."""


class PreconditionViolated(SitnikovError, ValueError):
    """An operation was called outside of its documented preconditions."""


class EccentricityOutOfRange(PreconditionViolated):
    """Eccentricity outside of [0, 1)."""

    def __init__(self, e: float) -> None:
        super().__init__(e)
        self.e = e

    def __str__(self) -> str:
        return f"eccentricity must lie in [0, 1), got {self.e!r}"


class VelocityOutOfRange(PreconditionViolated):
    """Initial velocity of an odd orbit outside of (0, 2)."""

    def __init__(self, eta: float) -> None:
        super().__init__(eta)
        self.eta = eta

    def __str__(self) -> str:
        return f"initial velocity must lie in (0, 2), got {self.eta!r}"


class EnergyOutOfRange(PreconditionViolated):
    """Energy outside of the band (-2, 0) of closed orbits."""

    def __init__(self, h: float) -> None:
        super().__init__(h)
        self.h = h

    def __str__(self) -> str:
        return f"energy must lie in (-2, 0), got {self.h!r}"


class PeriodNotAttainable(PreconditionViolated):
    """No closed orbit of the circular problem has the requested period."""

    def __init__(self, period: float, reason: str = "") -> None:
        super().__init__(period, reason)
        self.period = period
        self.reason = reason

    def __str__(self) -> str:
        message = f"no closed orbit has period {self.period!r}"
        return f"{message}: {self.reason}" if self.reason else message


class InadmissibleFrequency(PreconditionViolated):
    """Frequency pair (m, p) violates 1 <= p <= floor(sqrt(8) m)."""

    def __init__(self, m: int, p: int, bound: Optional[int] = None) -> None:
        super().__init__(m, p, bound)
        self.m = m
        self.p = p
        self.bound = bound

    def __str__(self) -> str:
        detail = f" (p must not exceed {self.bound})" if self.bound is not None else ""
        return f"frequency pair (m={self.m}, p={self.p}) is not admissible{detail}"


class NumericalError(SitnikovError, RuntimeError):
    """Base class for failures of the numerical machinery."""


class StepLimitExceeded(NumericalError):
    """The integrator used up its step budget before reaching the end of the span."""


class NonFiniteState(NumericalError):
    """A NaN or an infinity appeared in the integrated state."""


class EventNotFound(NumericalError):
    """The event function never changed sign within the step budget."""


class DeterminantViolation(NumericalError):
    """A monodromy matrix is too far from unit determinant to be trusted."""


class IdentityViolation(NumericalError):
    """A structural identity checked by an operation exceeded its tolerance."""

    def __init__(self, name: str, residual: float, tolerance: float) -> None:
        super().__init__(name, residual, tolerance)
        self.name = name
        self.residual = residual
        self.tolerance = tolerance

    def __str__(self) -> str:
        return f"{self.name}: residual {self.residual:.3e} exceeds tolerance {self.tolerance:.1e}"


class NewtonDiverged(NumericalError):
    """Shooting failed to converge; ``points`` holds whatever was computed before."""

    def __init__(self, message: str, points: Optional[List[Any]] = None) -> None:
        super().__init__(message)
        self.points: List[Any] = list(points or [])
