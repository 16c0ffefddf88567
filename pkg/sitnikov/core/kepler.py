"""
Kepler equation and the separation of the primaries.
"""

import math
from typing import Union

import numpy as np

from .errors import EccentricityOutOfRange, NumericalError
from .models import R0

ArrayLike = Union[float, np.ndarray]

KEPLER_TOL = 1e-13
_MAX_ITERATIONS = 100
_TWO_PI = 2.0 * math.pi


def check_eccentricity(e: float) -> None:
    if not 0.0 <= e < 1.0:
        raise EccentricityOutOfRange(e)


def _solve_reduced(t: float, e: float) -> float:
    """Solve u - e sin u = t for t in [0, 2pi)."""
    if e == 0.0:
        return t
    lo, hi = t - e, t + e
    u = t + e * math.sin(t)
    for _ in range(_MAX_ITERATIONS):
        residual = u - e * math.sin(u) - t
        if abs(residual) <= KEPLER_TOL:
            return u
        if residual > 0.0:
            hi = u
        else:
            lo = u
        step = u - residual / (1.0 - e * math.cos(u))
        # Newton left the bracket: fall back to bisection
        u = step if lo < step < hi else 0.5 * (lo + hi)
    raise NumericalError(f"Kepler solve did not converge for t={t!r}, e={e!r}")


def solve_kepler(t: ArrayLike, e: float) -> ArrayLike:
    """
    Eccentric anomaly u with u - e sin u = t.

    The mean anomaly is reduced to [0, 2pi) first and the shift is added back,
    so u(t + 2pi) = u(t) + 2pi holds exactly.
    """
    check_eccentricity(e)
    if np.ndim(t) == 0:
        t = float(t)
        turns = math.floor(t / _TWO_PI)
        return _solve_reduced(t - _TWO_PI * turns, e) + _TWO_PI * turns
    flat = np.asarray(t, dtype=float)
    return np.vectorize(lambda s: solve_kepler(float(s), e), otypes=[float])(flat)


def radius(t: ArrayLike, e: float) -> ArrayLike:
    """Separation r(t, e) = r0 (1 - e cos u(t, e)) with r0 = 1/2."""
    u = solve_kepler(t, e)
    return R0 * (1.0 - e * np.cos(u))


def radius_de(t: ArrayLike) -> ArrayLike:
    """dr/de at e = 0, which is -r0 cos t."""
    return -R0 * np.cos(t)


def radius_dt(t: ArrayLike, e: float) -> ArrayLike:
    """dr/dt = r0 e sin u / (1 - e cos u)."""
    u = solve_kepler(t, e)
    return R0 * e * np.sin(u) / (1.0 - e * np.cos(u))
