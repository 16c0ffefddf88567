"""
The circular Sitnikov problem x'' + f(x) = 0, f(x) = x / (x^2 + r0^2)^(3/2).

Energies follow the shifted convention H(x, v) = v^2/2 - 1/sqrt(x^2 + r0^2),
so closed orbits fill h in (-2, 0). The unshifted energy h + 2 = eta^2/2
appears only where the period derivative is compared with monodromy data.
"""

import logging
import math
from typing import Literal, Optional, Sequence, Union

import numpy as np
from scipy.optimize import brentq

from ..core.errors import (
    EnergyOutOfRange,
    NumericalError,
    PeriodNotAttainable,
    PreconditionViolated,
    VelocityOutOfRange,
)
from ..core.integrator import integrate, integrate_to_event, velocity_event
from ..core.models import MIN_PERIOD, R0, CircularOrbit, IntegratorConfig, PhaseState
from .base import NewtonianProblem

logger = logging.getLogger(__name__)

ETA_MAX = 2.0
PERIOD_TOL = 1e-10
_ROOT_MAXITER = 200
_BRACKET_FLOOR = -2.0 + 1e-10


def force(x: Union[float, np.ndarray]) -> Union[float, np.ndarray]:
    """f(x) = x / (x^2 + r0^2)^(3/2)."""
    return x / (x * x + R0 * R0) ** 1.5


def force_prime(x: Union[float, np.ndarray]) -> Union[float, np.ndarray]:
    """f'(x) = (r0^2 - 2 x^2) / (x^2 + r0^2)^(5/2)."""
    s = x * x + R0 * R0
    return (R0 * R0 - 2.0 * x * x) / s**2.5


def energy(x: Union[float, np.ndarray], v: Union[float, np.ndarray]) -> Union[float, np.ndarray]:
    return 0.5 * v * v - 1.0 / np.sqrt(x * x + R0 * R0)


def potential_depth(x: Union[float, np.ndarray]) -> Union[float, np.ndarray]:
    """E(x) = 1/r0 - 1/sqrt(x^2 + r0^2): zero at the origin, tends to 2 at infinity."""
    return 1.0 / R0 - 1.0 / np.sqrt(x * x + R0 * R0)


def energy_above_origin(h: float) -> float:
    """Unshifted energy v^2/2 + E(x) with E(0) = 0."""
    return h + 2.0


def eta_from_energy(h: float) -> float:
    return math.sqrt(2.0 * (h + 2.0))


def energy_from_eta(eta: float) -> float:
    return 0.5 * eta * eta - 2.0


def xi_from_energy(h: float) -> float:
    return math.sqrt(1.0 / (h * h) - R0 * R0)


def energy_from_xi(xi: float) -> float:
    return -1.0 / math.sqrt(xi * xi + R0 * R0)


class CircularProblem(NewtonianProblem):
    """Autonomous field of the circular problem."""

    def __init__(self) -> None:
        super().__init__("circular")

    def force(self, x: float, t: float) -> float:
        return force(x)

    def stiffness(self, x: float, t: float) -> float:
        return force_prime(x)


CIRCULAR = CircularProblem()


def field_circular(state: PhaseState) -> np.ndarray:
    """Derivative (x', v') = (v, -f(x)) at a phase state."""
    return CIRCULAR.rhs(state.t, state.as_vector())


def _check_energy(h: float) -> None:
    if not -2.0 < h < 0.0:
        raise EnergyOutOfRange(h)


def _check_eta(eta: float) -> None:
    if not 0.0 < eta < ETA_MAX:
        raise VelocityOutOfRange(eta)


def _check_xi(xi: float) -> None:
    if not xi > 0.0:
        raise PreconditionViolated(f"amplitude must be positive, got {xi!r}")


def _state_at(y0: np.ndarray, t: float, cfg: Optional[IntegratorConfig]) -> PhaseState:
    run = integrate(CIRCULAR.rhs, y0, (0.0, float(t)), cfg)
    return PhaseState.from_vector(t, run.y)


def sample_orbit(
    y0: Sequence[float], times: Sequence[float], cfg: Optional[IntegratorConfig] = None
) -> np.ndarray:
    """States (x, v) of the circular field from y0 at t = 0, sampled at times of either sign."""
    times = np.asarray(times, dtype=float)
    out = np.empty((times.size, 2))
    for sign in (1.0, -1.0):
        mask = times * sign > 0.0
        if mask.any():
            end = float(times[mask].max() if sign > 0 else times[mask].min())
            run = integrate(CIRCULAR.rhs, y0, (0.0, end), cfg, t_eval=times[mask])
            out[mask] = run.samples
    out[times == 0.0] = np.asarray(y0, dtype=float)
    return out


def odd_solution(eta: float, t: float, cfg: Optional[IntegratorConfig] = None) -> PhaseState:
    """S(t, eta): the solution through (0, eta) at t = 0."""
    _check_eta(eta)
    return _state_at(np.array([0.0, eta]), t, cfg)


def even_solution(xi: float, t: float, cfg: Optional[IntegratorConfig] = None) -> PhaseState:
    """C(t, xi): the solution through (xi, 0) at t = 0."""
    _check_xi(xi)
    return _state_at(np.array([xi, 0.0]), t, cfg)


def period(h: float, cfg: Optional[IntegratorConfig] = None) -> float:
    """
    Minimal period T(h) of the closed orbit at energy h.

    Computed as four times the first turning time of the odd solution. The
    absolute tolerance is scaled down with eta so that small oscillations near
    h = -2 keep their relative accuracy.
    """
    _check_energy(h)
    eta = eta_from_energy(h)
    cfg = cfg or IntegratorConfig()
    if eta < 1.0:
        cfg = cfg.model_copy(update={"abs_tol": min(cfg.abs_tol, cfg.rel_tol * eta)})
    t_quarter, _ = integrate_to_event(
        CIRCULAR.rhs, [0.0, eta], 0.0, velocity_event(direction=-1, horizon=1e4), cfg
    )
    return 4.0 * t_quarter


def half_period_sensitivity(eta: float, cfg: Optional[IntegratorConfig] = None) -> float:
    """dS/d(eta) at t = T/2, obtained from the variational equation."""
    _check_eta(eta)
    half = 0.5 * period(energy_from_eta(eta), cfg)
    run = integrate(CIRCULAR.variational_rhs, [0.0, eta, 0.0, 1.0], (0.0, half), cfg)
    return float(run.y[2])


def period_derivative(
    h: float,
    cfg: Optional[IntegratorConfig] = None,
    method: Literal["difference", "monodromy"] = "difference",
) -> float:
    """
    T'(h).

    ``difference`` takes a centered difference of period() with step
    1e-6 max(1, |h|); within one step of the bottom of the band it switches to
    the second-order forward difference (-3 T(h) + 4 T(h + d) - T(h + 2d)) / 2d.
    ``monodromy`` uses dS/d(eta)(T/2) = (eta^2/2) T'(h) and loses precision as
    eta^2 -> 0 near h = -2.
    """
    _check_energy(h)
    if method == "monodromy":
        eta = eta_from_energy(h)
        return 2.0 * half_period_sensitivity(eta, cfg) / (eta * eta)
    if method != "difference":
        raise ValueError(f"unknown method {method!r}")
    delta = min(1e-6 * max(1.0, abs(h)), -0.25 * h)
    if h - delta <= -2.0:
        near, mid, far = (period(h + k * delta, cfg) for k in (0.0, 1.0, 2.0))
        return (-3.0 * near + 4.0 * mid - far) / (2.0 * delta)
    return (period(h + delta, cfg) - period(h - delta, cfg)) / (2.0 * delta)


def solve_energy_for_period(T_target: float, cfg: Optional[IntegratorConfig] = None) -> float:
    """
    Energy h with T(h) = T_target, by bracketing and Brent's method on monotone T.

    Raises:
        PeriodNotAttainable: T_target is not above the small-oscillation period
            or needs an orbit too close to escape
        NumericalError: T(h) misses T_target by more than
            max(1e-10, 100 rel_tol) max(1, T_target)
    """
    if not T_target > MIN_PERIOD:
        raise PeriodNotAttainable(T_target, f"periods start above {MIN_PERIOD:.6f}")

    def residual(h: float) -> float:
        return period(h, cfg) - T_target

    lo = _BRACKET_FLOOR
    if residual(lo) >= 0.0:
        raise PeriodNotAttainable(T_target, "too close to the small-oscillation limit")

    hi = -0.5
    while residual(hi) <= 0.0:
        lo = hi
        hi *= 0.5
        if hi > -1e-9:
            raise PeriodNotAttainable(T_target, "orbit would be too close to escape")
    logger.debug("period %.6f bracketed in h = [%.6g, %.6g]", T_target, lo, hi)

    h = brentq(residual, lo, hi, xtol=1e-15, rtol=4.0 * np.finfo(float).eps, maxiter=_ROOT_MAXITER)
    miss = abs(residual(h))
    rel_tol = (cfg or IntegratorConfig()).rel_tol
    if miss > max(PERIOD_TOL, 100.0 * rel_tol) * max(1.0, T_target):
        raise NumericalError(f"period inversion for T={T_target:.6f} missed by {miss:.3e}")
    return float(h)


def circular_orbit(h: float, cfg: Optional[IntegratorConfig] = None) -> CircularOrbit:
    """Full record of the energy level h."""
    _check_energy(h)
    return CircularOrbit(
        h=h,
        eta=eta_from_energy(h),
        xi=xi_from_energy(h),
        T=period(h, cfg),
        Tprime=period_derivative(h, cfg),
    )


def energy_drift(eta: float, samples: int = 64, cfg: Optional[IntegratorConfig] = None) -> float:
    """Largest |H - h| along one period of S(t, eta)."""
    _check_eta(eta)
    h = energy_from_eta(eta)
    T = period(h, cfg)
    states = sample_orbit([0.0, eta], np.linspace(0.0, T, samples), cfg)
    return float(np.max(np.abs(energy(states[:, 0], states[:, 1]) - h)))
