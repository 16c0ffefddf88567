"""
Continuation of symmetric (m, p) families into e > 0 and finite-difference
trace slopes.
"""

import logging
from typing import List, Optional, Sequence, Tuple

from ..core.errors import NewtonDiverged, PreconditionViolated
from ..core.models import ContinuationPoint, FrequencyPair, IntegratorConfig, Parity
from ..problems.elliptic import shooter_for
from .slopes import resolve_orbit

logger = logging.getLogger(__name__)

DEFAULT_FD_ECCENTRICITIES = (1e-2, 5e-3, 2.5e-3)


def _check_eccentricities(e_list: Sequence[float]) -> None:
    if not e_list:
        raise PreconditionViolated("eccentricity list is empty")
    if any(not 0.0 <= e < 1.0 for e in e_list):
        raise PreconditionViolated(f"eccentricities must lie in [0, 1), got {list(e_list)}")
    if any(b < a for a, b in zip(e_list, e_list[1:])):
        raise PreconditionViolated("eccentricities must be sorted ascending")


def _predict(anchors: List[Tuple[float, float]], e: float) -> float:
    """Linear extrapolation through the last two converged points."""
    if len(anchors) < 2:
        return anchors[-1][1]
    (e0, v0), (e1, v1) = anchors[-2], anchors[-1]
    if e1 == e0:
        return v1
    return v1 + (v1 - v0) * (e - e1) / (e1 - e0)


def trace_along_family(
    mp: FrequencyPair,
    parity: Parity,
    e_list: Sequence[float],
    cfg: Optional[IntegratorConfig] = None,
) -> List[ContinuationPoint]:
    """
    Shoot the (m, p) family of the given parity at each eccentricity in turn.

    The family is seeded from the circular orbit at e = 0 and each guess is
    extrapolated from the previous two solutions. When Newton fails at e_k the
    step from the last converged eccentricity is halved once before giving up.

    Raises:
        NewtonDiverged: at the failing eccentricity; ``points`` holds the
            points computed before it
    """
    _check_eccentricities(e_list)
    shoot = shooter_for(parity)
    orbit = resolve_orbit(mp, cfg)
    seed = orbit.eta if parity is Parity.ODD else orbit.xi
    anchors: List[Tuple[float, float]] = [(0.0, seed)]
    points: List[ContinuationPoint] = []

    for e in e_list:
        try:
            point = shoot(mp, e, _predict(anchors, e), cfg)
        except NewtonDiverged as exc:
            e_last = anchors[-1][0]
            if e <= e_last:
                raise NewtonDiverged(f"{parity.value} {mp} family at e={e}: {exc}", points) from exc
            e_mid = 0.5 * (e_last + e)
            logger.info("Newton failed at e=%g, retrying through e=%g", e, e_mid)
            try:
                middle = shoot(mp, e_mid, _predict(anchors, e_mid), cfg)
                anchors.append((e_mid, middle.shoot_param))
                point = shoot(mp, e, _predict(anchors, e), cfg)
            except NewtonDiverged as retry:
                raise NewtonDiverged(
                    f"{parity.value} {mp} family lost at e={e}: {retry}", points
                ) from retry
        points.append(point)
        if e > anchors[-1][0]:
            anchors.append((e, point.shoot_param))
        else:
            anchors[-1] = (e, point.shoot_param)
    return points


def finite_difference_slope(
    mp: FrequencyPair,
    parity: Parity,
    e_values: Sequence[float] = DEFAULT_FD_ECCENTRICITIES,
    cfg: Optional[IntegratorConfig] = None,
) -> float:
    """
    Richardson-extrapolated d(tau)/de at e = 0.

    With d(e) = (tau(e) - tau(0)) / e on eccentricities e, e/2, e/4 the
    first-order error cancels in R1 = 2 d(e/2) - d(e), R2 = 2 d(e/4) - d(e/2),
    and the second-order error in (4 R2 - R1) / 3.
    """
    levels = sorted(e_values, reverse=True)
    if len(levels) != 3 or levels[-1] <= 0.0:
        raise PreconditionViolated("need three positive eccentricities e, e/2, e/4")
    for big, small in zip(levels, levels[1:]):
        if abs(big - 2.0 * small) > 1e-12 * big:
            raise PreconditionViolated(f"eccentricities must halve, got {levels}")

    points = trace_along_family(mp, parity, [0.0] + levels[::-1], cfg)
    tau0 = points[0].tau
    quotients = {p.e: (p.tau - tau0) / p.e for p in points[1:]}
    d1, d2, d4 = (quotients[e] for e in levels)
    first = 2.0 * d2 - d1
    second = 2.0 * d4 - d2
    slope = (4.0 * second - first) / 3.0
    logger.debug(
        "%s %s quotients %.10e %.10e %.10e -> %.10e", parity.value, mp, d1, d2, d4, slope
    )
    return slope
