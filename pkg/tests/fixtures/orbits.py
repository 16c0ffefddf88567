"""
Solved circular orbits shared across test modules.

Inverting the period function is the slowest step of most tests, so each
energy level is solved once per session.
"""

import functools

from sitnikov.analysis.slopes import resolve_orbit
from sitnikov.core.models import CircularOrbit, FrequencyPair


@functools.lru_cache(maxsize=None)
def orbit_for(m: int, p: int) -> CircularOrbit:
    """Circular orbit with minimal period 2m*pi/p at default tolerances."""
    return resolve_orbit(FrequencyPair(m=m, p=p))


def resonant_orbit(n: int) -> CircularOrbit:
    """The 2n*pi-periodic orbit with one pair of zeros per period."""
    return orbit_for(2 * n, 1)
