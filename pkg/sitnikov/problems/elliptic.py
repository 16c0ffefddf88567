"""
The elliptic Sitnikov problem x'' + F(x, t, e) = 0 and shooting for its
symmetric periodic orbits.

F(x, t, e) = x / (x^2 + r(t, e)^2)^(3/2), where r(t, e) is the separation of
the primaries. Odd (m, p) orbits are found by Newton on eta with X(m*pi) = 0,
even ones by Newton on xi with X'(m*pi) = 0. Both derivatives come from the
variational equation.
"""

import logging
import math
from typing import Callable, Optional, Tuple, Union

import numpy as np

from ..core.errors import NewtonDiverged, PreconditionViolated
from ..core.hill import HillSystem, classify, fundamental_solutions
from ..core.integrator import integrate
from ..core.kepler import check_eccentricity, radius
from ..core.models import (
    R0,
    ContinuationPoint,
    FrequencyPair,
    IntegratorConfig,
    Parity,
    PhaseState,
)
from .base import NewtonianProblem
from .circular import ETA_MAX

logger = logging.getLogger(__name__)

SHOOT_TOL = 1e-10
MAX_NEWTON_ITERATIONS = 25
SYMMETRY_SAMPLES = 33

ArrayLike = Union[float, np.ndarray]


class EllipticProblem(NewtonianProblem):
    """Field of the elliptic problem at a fixed eccentricity."""

    def __init__(self, e: float) -> None:
        check_eccentricity(e)
        super().__init__(f"elliptic(e={e})")
        self.e = float(e)

    def force(self, x: float, t: float) -> float:
        r = radius(t, self.e)
        return x / (x * x + r * r) ** 1.5

    def stiffness(self, x: float, t: float) -> float:
        return dFdx(x, t, self.e)


def field_elliptic(state: PhaseState, e: float) -> np.ndarray:
    """Derivative (x', v') = (v, -F(x, t, e)) at a phase state."""
    return EllipticProblem(e).rhs(state.t, state.as_vector())


def dFdx(x: ArrayLike, t: ArrayLike, e: float) -> ArrayLike:
    """dF/dx = (r^2 - 2 x^2) / (x^2 + r^2)^(5/2)."""
    r = radius(t, e)
    r2 = r * r
    return (r2 - 2.0 * x * x) / (x * x + r2) ** 2.5


def mixed_derivative_te(x: ArrayLike, t: ArrayLike) -> ArrayLike:
    """d^2F/dt de at e = 0: -3 x sin t / (4 (x^2 + r0^2)^(5/2))."""
    return -3.0 * x * np.sin(t) / (4.0 * (x * x + R0 * R0) ** 2.5)


class _ShootingSetup:
    """Per-parity layout of the Newton problem."""

    def __init__(self, parity: Parity) -> None:
        self.parity = parity
        if parity is Parity.ODD:
            # unknown eta, residual X(m*pi), derivative psi2 = dX/d(eta)
            self.column = np.array([0.0, 1.0])
            self.residual_index = 0
        else:
            # unknown xi, residual X'(m*pi), derivative psi1' = dX'/d(xi)
            self.column = np.array([1.0, 0.0])
            self.residual_index = 1

    def start(self, value: float) -> np.ndarray:
        if self.parity is Parity.ODD:
            return np.array([0.0, value])
        return np.array([value, 0.0])

    def in_range(self, value: float) -> bool:
        if self.parity is Parity.ODD:
            return 0.0 < value < ETA_MAX
        return value > 0.0 and math.isfinite(value)


def _newton(
    problem: EllipticProblem,
    setup: _ShootingSetup,
    half: float,
    guess: float,
    cfg: Optional[IntegratorConfig],
) -> Tuple[float, float, int]:
    value = float(guess)
    label = "eta" if setup.parity is Parity.ODD else "xi"
    for iteration in range(MAX_NEWTON_ITERATIONS + 1):
        if not setup.in_range(value):
            raise NewtonDiverged(f"{label} left its range at iteration {iteration}: {value!r}")
        z0 = np.concatenate((setup.start(value), setup.column))
        run = integrate(problem.variational_rhs, z0, (0.0, half), cfg)
        residual = float(run.y[setup.residual_index])
        logger.debug(
            "shoot %s iteration %d: %s=%.15f residual=%.3e",
            setup.parity.value,
            iteration,
            label,
            value,
            residual,
        )
        if abs(residual) <= SHOOT_TOL:
            return value, abs(residual), iteration
        if iteration == MAX_NEWTON_ITERATIONS:
            break
        slope = float(run.y[2 + setup.residual_index])
        if slope == 0.0 or not math.isfinite(slope):
            raise NewtonDiverged(f"degenerate shooting derivative at {label}={value!r}")
        value -= residual / slope
    raise NewtonDiverged(
        f"no convergence after {MAX_NEWTON_ITERATIONS} Newton iterations "
        f"(residual {abs(residual):.3e})"
    )


def symmetry_residual(
    problem: NewtonianProblem,
    y0: np.ndarray,
    half: float,
    parity: Parity,
    cfg: Optional[IntegratorConfig] = None,
    samples: int = SYMMETRY_SAMPLES,
) -> float:
    """
    Largest violation of x(t + half) = -x(t) and of the orbit's time symmetry.

    Odd orbits satisfy x(-t) = -x(t), even ones x(-t) = x(t).
    """
    grid = np.linspace(0.0, half, samples)
    times = np.concatenate((grid, grid + half))
    forward = integrate(problem.rhs, y0, (0.0, 2.0 * half), cfg, t_eval=times)
    backward = integrate(problem.rhs, y0, (0.0, -half), cfg, t_eval=-grid)
    x = forward.samples[:, 0]
    anti = np.max(np.abs(x[samples:] + x[:samples]))
    mirror = -1.0 if parity is Parity.ODD else 1.0
    reflect = np.max(np.abs(backward.samples[:, 0] - mirror * x[:samples]))
    return float(max(anti, reflect))


def _shoot(
    mp: FrequencyPair,
    e: float,
    guess: float,
    parity: Parity,
    cfg: Optional[IntegratorConfig],
) -> ContinuationPoint:
    mp.check_admissible()
    problem = EllipticProblem(e)
    setup = _ShootingSetup(parity)
    half = math.pi * mp.m
    value, residual, iterations = _newton(problem, setup, half, guess, cfg)

    y0 = setup.start(value)
    mono = fundamental_solutions(HillSystem.along_orbit(problem, y0, 2.0 * half), 2.0 * half, cfg)
    point = ContinuationPoint(
        e=e,
        mp=mp,
        parity=parity,
        shoot_param=value,
        tau=mono.trace,
        cls=classify(mono),
        monodromy=mono,
        residual=residual,
        iterations=iterations,
        symmetry_residual=symmetry_residual(problem, y0, half, parity, cfg),
    )
    logger.info(
        "%s %s family at e=%g: tau=%.12f (%s)", parity.value, mp, e, point.tau, point.cls.value
    )
    return point


def shoot_odd(
    mp: FrequencyPair, e: float, eta_guess: float, cfg: Optional[IntegratorConfig] = None
) -> ContinuationPoint:
    """
    Odd (m, p) orbit of the elliptic problem: Newton on eta until X(m*pi) = 0.

    Raises:
        NewtonDiverged: after 25 iterations, or if eta leaves (0, 2)
        InadmissibleFrequency: if p exceeds floor(sqrt(8) m)
    """
    return _shoot(mp, e, eta_guess, Parity.ODD, cfg)


def shoot_even(
    mp: FrequencyPair, e: float, xi_guess: float, cfg: Optional[IntegratorConfig] = None
) -> ContinuationPoint:
    """Even (m, p) orbit of the elliptic problem: Newton on xi until X'(m*pi) = 0."""
    return _shoot(mp, e, xi_guess, Parity.EVEN, cfg)


Shooter = Callable[[FrequencyPair, float, float, Optional[IntegratorConfig]], ContinuationPoint]


def shooter_for(parity: Parity) -> Shooter:
    if parity is Parity.ODD:
        return shoot_odd
    if parity is Parity.EVEN:
        return shoot_even
    raise PreconditionViolated(f"unknown parity {parity!r}")
