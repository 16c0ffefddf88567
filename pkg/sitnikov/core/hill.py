"""
Hill's equation y'' + q(t) y = 0: fundamental solutions, Poincare matrices,
stability classification and the derivative of the trace with respect to q.
"""

import logging
import math
from typing import Callable, Optional, Sequence, Tuple, Union

import numpy as np

from ..problems import circular
from ..problems.base import NewtonianProblem
from .errors import (
    DeterminantViolation,
    IdentityViolation,
    PreconditionViolated,
    VelocityOutOfRange,
)
from .integrator import integrate, integrate_with_quadrature
from .models import (
    HalfPeriodStructure,
    IntegratorConfig,
    Monodromy2x2,
    PsiIdentityReport,
    StabilityClass,
)

logger = logging.getLogger(__name__)

Potential = Callable[[float], float]

CLASSIFY_TOL = 1e-6
DET_TOL = 1e-6
STRUCTURE_TOL = 1e-6
RELATION_RTOL = 1e-5
PERIOD_RTOL = 1e-4

_IDENTITY_FRAME = np.array([1.0, 0.0, 0.0, 1.0])


class HillSystem:
    """
    A T-periodic potential q(t).

    The potential is either an explicit function of time, or the stiffness
    dF/dx(x(t), t) of a NewtonianProblem along the trajectory started at y0.
    In the second case the trajectory is integrated jointly with the
    fundamental columns so q is never interpolated.
    """

    def __init__(
        self,
        T: float,
        q: Optional[Potential] = None,
        problem: Optional[NewtonianProblem] = None,
        y0: Optional[Sequence[float]] = None,
        shift: Optional[Potential] = None,
    ) -> None:
        if not T > 0:
            raise PreconditionViolated(f"period must be positive, got {T!r}")
        if (q is None) == (problem is None):
            raise PreconditionViolated("give either a potential q or a driving problem")
        if problem is not None and y0 is None:
            raise PreconditionViolated("a driving problem needs its initial state y0")
        self.T = float(T)
        self.q = q
        self.problem = problem
        self.y0 = None if y0 is None else np.asarray(y0, dtype=float)
        self.shift = shift

    @classmethod
    def from_function(cls, q: Potential, T: float) -> "HillSystem":
        return cls(T, q=q)

    @classmethod
    def along_orbit(
        cls, problem: NewtonianProblem, y0: Sequence[float], T: float
    ) -> "HillSystem":
        """Linearization of problem along the solution through y0 at t = 0."""
        return cls(T, problem=problem, y0=y0)

    @property
    def driven(self) -> bool:
        return self.problem is not None

    @property
    def offset(self) -> int:
        """Index of the first fundamental column in the integrated state."""
        return 2 if self.driven else 0

    def potential(self, t: float, x: Optional[float] = None) -> float:
        """q(t); driven systems need the trajectory position x(t)."""
        if self.driven:
            value = self.problem.stiffness(x, t)
        else:
            value = self.q(t)
        if self.shift is not None:
            value += self.shift(t)
        return float(value)

    def initial_state(self, columns: np.ndarray = _IDENTITY_FRAME) -> np.ndarray:
        columns = np.asarray(columns, dtype=float)
        if self.driven:
            return np.concatenate((self.y0, columns))
        return columns.copy()

    def rhs(self, t: float, z: np.ndarray) -> np.ndarray:
        if self.driven:
            out = self.problem.variational_rhs(t, z)
            if self.shift is not None:
                out[3::2] -= self.shift(t) * z[2::2]
            return out
        out = np.empty_like(z)
        out[0::2] = z[1::2]
        out[1::2] = -self.potential(t) * z[0::2]
        return out

    def potential_samples(
        self, times: Sequence[float], cfg: Optional[IntegratorConfig] = None
    ) -> np.ndarray:
        """q at non-negative times."""
        times = np.asarray(times, dtype=float)
        if not self.driven:
            return np.array([self.potential(t) for t in times])
        run = integrate(self.problem.rhs, self.y0, (0.0, float(times.max())), cfg, t_eval=times)
        return np.array([self.potential(t, x) for t, x in zip(times, run.samples[:, 0])])

    def periodicity_residual(
        self, samples: int = 32, cfg: Optional[IntegratorConfig] = None
    ) -> float:
        """max |q(t + T) - q(t)| on a grid over one period."""
        grid = np.linspace(0.0, self.T, samples, endpoint=False)
        values = self.potential_samples(np.concatenate((grid, grid + self.T)), cfg)
        return float(np.max(np.abs(values[samples:] - values[:samples])))

    def __repr__(self) -> str:
        source = self.problem.name if self.driven else "function"
        return f"HillSystem(T={self.T!r}, q={source})"


def _check_end(t_end: float) -> None:
    if not t_end > 0:
        raise PreconditionViolated(f"interval end must be positive, got {t_end!r}")


def fundamental_solutions(
    sys: HillSystem, t_end: float, cfg: Optional[IntegratorConfig] = None
) -> Monodromy2x2:
    """
    Poincare matrix [[psi1, psi2], [psi1', psi2']] at t_end.

    Both columns are integrated as one first-order system in a single pass.
    """
    _check_end(t_end)
    run = integrate(sys.rhs, sys.initial_state(), (0.0, float(t_end)), cfg)
    y1, y1p, y2, y2p = run.y[sys.offset : sys.offset + 4]
    mono = Monodromy2x2(a=y1, b=y2, c=y1p, d=y2p, length=float(t_end))
    drift = abs(mono.det - 1.0)
    if drift > 1e-8:
        logger.warning("determinant drift %.3e over [0, %g]", drift, t_end)
    return mono


def fundamental_path(
    sys: HillSystem, times: Sequence[float], cfg: Optional[IntegratorConfig] = None
) -> np.ndarray:
    """
    Rows (psi1, psi1', psi2, psi2') at each of the given non-negative times.

    Driven systems put the trajectory (x, v) in front of each row.
    """
    times = np.asarray(times, dtype=float)
    if np.any(times < 0.0):
        raise PreconditionViolated("fundamental_path needs non-negative times")
    run = integrate(sys.rhs, sys.initial_state(), (0.0, float(times.max())), cfg, t_eval=times)
    return run.samples[:, : sys.offset + 4]


def classify(
    mono: Monodromy2x2, tol: float = CLASSIFY_TOL, det_tol: float = DET_TOL
) -> StabilityClass:
    """Stability type from the trace and, on the parabolic band, the off-diagonal entries."""
    drift = abs(mono.det - 1.0)
    if drift > det_tol:
        raise DeterminantViolation(f"det = {mono.det!r} deviates from 1 by {drift:.3e}")
    size = abs(mono.trace)
    if size < 2.0 - tol:
        return StabilityClass.ELLIPTIC
    if size > 2.0 + tol:
        return StabilityClass.HYPERBOLIC
    b_zero = abs(mono.b) <= tol
    c_zero = abs(mono.c) <= tol
    if b_zero and c_zero:
        return StabilityClass.PARABOLIC_STABLE
    if b_zero != c_zero:
        return StabilityClass.PARABOLIC_UNSTABLE
    return StabilityClass.PARABOLIC_UNDETERMINED


def _kernel(mono: Monodromy2x2, psi1: np.ndarray, psi2: np.ndarray) -> np.ndarray:
    return -mono.b * psi1 * psi1 + (mono.a - mono.d) * psi1 * psi2 + mono.c * psi2 * psi2


def trace_frechet_kernel(
    sys: HillSystem, s: Union[float, Sequence[float]], cfg: Optional[IntegratorConfig] = None
) -> Union[float, np.ndarray]:
    """
    K(s) = -psi2(T) psi1(s)^2 + (psi1(T) - psi2'(T)) psi1(s) psi2(s) + psi1'(T) psi2(s)^2.

    The trace of the period map moves by the integral of K(s) dq(s) when q
    moves by dq.
    """
    points = np.atleast_1d(np.asarray(s, dtype=float))
    if np.any((points < 0.0) | (points > sys.T)):
        raise PreconditionViolated(f"kernel is defined on [0, {sys.T}]")
    mono = fundamental_solutions(sys, sys.T, cfg)
    path = fundamental_path(sys, points, cfg)
    off = sys.offset
    values = _kernel(mono, path[:, off], path[:, off + 2])
    return float(values[0]) if np.ndim(s) == 0 else values


def trace_derivative(
    sys: HillSystem, dq: Potential, cfg: Optional[IntegratorConfig] = None
) -> float:
    """Directional derivative of the trace: integral over [0, T] of K(s) dq(s)."""
    mono = fundamental_solutions(sys, sys.T, cfg)
    off = sys.offset

    def integrand(t: float, z: np.ndarray) -> float:
        return float(_kernel(mono, z[off], z[off + 2]) * dq(t))

    _, value = integrate_with_quadrature(sys.rhs, sys.initial_state(), integrand, (0.0, sys.T), cfg)
    return float(value)


def perturbed(sys: HillSystem, dq: Potential, eps: float) -> HillSystem:
    """The same system with potential q + eps dq."""
    base = sys.shift

    def shift(t: float) -> float:
        extra = eps * dq(t)
        return extra if base is None else base(t) + extra

    return HillSystem(sys.T, q=sys.q, problem=sys.problem, y0=sys.y0, shift=shift)


def _odd_orbit_system(eta: float, cfg: Optional[IntegratorConfig]) -> Tuple[HillSystem, float]:
    h = circular.energy_from_eta(eta)
    T = circular.period(h, cfg)
    return HillSystem.along_orbit(circular.CIRCULAR, [0.0, eta], T), h


def verify_psi_identities(
    eta: float,
    times: Sequence[float],
    cfg: Optional[IntegratorConfig] = None,
    delta: float = 1e-6,
) -> PsiIdentityReport:
    """
    Compare the fundamental solutions along S(t, eta) with their closed forms.

    psi1 = S'/eta and psi1' = -f(S)/eta are checked against the jointly
    integrated orbit; psi2 = dS/d(eta) against a centered difference in eta.
    """
    if not 0.0 < eta < circular.ETA_MAX:
        raise VelocityOutOfRange(eta)
    sys, _ = _odd_orbit_system(eta, cfg)
    times = np.asarray(times, dtype=float)
    path = fundamental_path(sys, times, cfg)
    x, v, psi1, psi1p, psi2 = path[:, 0], path[:, 1], path[:, 2], path[:, 3], path[:, 4]

    upper = circular.sample_orbit([0.0, eta + delta], times, cfg)[:, 0]
    lower = circular.sample_orbit([0.0, eta - delta], times, cfg)[:, 0]
    dS = (upper - lower) / (2.0 * delta)

    report = PsiIdentityReport(
        eta=eta,
        samples=int(times.size),
        psi1_residual=float(np.max(np.abs(psi1 - v / eta))),
        psi1dot_residual=float(np.max(np.abs(psi1p + circular.force(x) / eta))),
        psi2_residual=float(np.max(np.abs(psi2 - dS))),
    )
    logger.debug("psi identities at eta=%.6f: %s", eta, report)
    return report


def half_period_structure(
    eta: float, n: int, cfg: Optional[IntegratorConfig] = None
) -> HalfPeriodStructure:
    """
    Poincare matrix over n half periods of S(t, eta).

    It must read [[(-1)^n, b_n], [0, (-1)^n]] with
    b_n = (-1)^(n+1) n psi2(T/2) = (-1)^(n+1) n (eta^2/2) T'(h).

    Raises:
        IdentityViolation: if any of the three identities misses its tolerance
    """
    if n < 1:
        raise PreconditionViolated(f"n must be >= 1, got {n!r}")
    sys, h = _odd_orbit_system(eta, cfg)
    b_hat = fundamental_solutions(sys, 0.5 * sys.T, cfg).b
    mono = fundamental_solutions(sys, 0.5 * n * sys.T, cfg)

    sign = (-1.0) ** n
    # T'(h) in either energy convention: the shift h + 2 is constant
    Tprime = circular.period_derivative(h, cfg)
    b_n_expected = -sign * n * (0.5 * eta * eta) * Tprime
    structure = max(abs(mono.a - sign), abs(mono.d - sign), abs(mono.c))
    relation = abs(mono.b + sign * n * b_hat) / max(abs(mono.b), 1e-300)
    period_gap = abs(mono.b - b_n_expected) / max(abs(b_n_expected), 1e-300)

    result = HalfPeriodStructure(
        eta=eta,
        n=n,
        monodromy=mono,
        b_hat=b_hat,
        b_n=mono.b,
        b_n_expected=b_n_expected,
        structure_residual=structure,
        relation_residual=relation,
        period_residual=period_gap,
    )
    for name, residual, tolerance in (
        ("half-period structure", structure, STRUCTURE_TOL),
        ("b_n = (-1)^(n+1) n b_hat", relation, RELATION_RTOL),
        ("b_hat = (eta^2/2) T'", period_gap, PERIOD_RTOL),
    ):
        if not residual <= tolerance:
            raise IdentityViolation(name, residual, tolerance)
    return result


def orbit_stability(
    eta: float, cfg: Optional[IntegratorConfig] = None
) -> Tuple[Monodromy2x2, StabilityClass]:
    """Period matrix and stability type of the odd circular orbit through (0, eta)."""
    sys, _ = _odd_orbit_system(eta, cfg)
    mono = fundamental_solutions(sys, sys.T, cfg)
    return mono, classify(mono)


def harmonic_trace(omega_sq: float, T: float) -> float:
    """Trace of the period map of y'' + omega_sq y = 0 over [0, T], in closed form."""
    if omega_sq > 0:
        return 2.0 * math.cos(math.sqrt(omega_sq) * T)
    if omega_sq < 0:
        return 2.0 * math.cosh(math.sqrt(-omega_sq) * T)
    return 2.0
