"""
Closed-form trace slopes at e = 0 for the symmetric (m, p) families.

For an odd family the slope of the 2m*pi trace is
    tau'(0) = (1/4) p T'(h) * integral over [0, 2m*pi] of G(t) cos t,
with G = 1 / (phi^2 + r0^2)^(3/2) along the circular orbit phi. The same
expression along the even orbit gives the slope of the even family. Only
resonant pairs m = 2pn can have a nonzero slope, and there it factors as
p^2 T'(h) A_n.
"""

import functools
import logging
import math
from typing import List, Optional, Tuple, Union

import numpy as np
from scipy.integrate import quad

from ..core.errors import IdentityViolation, PreconditionViolated
from ..core.integrator import integrate, integrate_with_quadrature
from ..core.models import (
    R0,
    CircularOrbit,
    FrequencyPair,
    IntegratorConfig,
    Parity,
    ReferenceTable,
    ScanRow,
    SlopeReport,
    StabilityClass,
    VanishingReport,
)
from ..core.parallel import ordered_map
from ..problems import circular
from ..problems.elliptic import mixed_derivative_te

logger = logging.getLogger(__name__)

VERDICT_TOL = 1e-6
VANISHING_TOL = 1e-7
PARTS_RTOL = 1e-6
FOLD_TOL = 1e-8
CERTIFICATE_TOL = 1e-6


def resolve_orbit(mp: FrequencyPair, cfg: Optional[IntegratorConfig] = None) -> CircularOrbit:
    """Energy level whose circular orbits have minimal period 2m*pi/p."""
    mp.check_admissible()
    h = circular.solve_energy_for_period(mp.orbit_period, cfg)
    return circular.circular_orbit(h, cfg)


def orbit_start(orbit: CircularOrbit, parity: Parity) -> np.ndarray:
    """(0, eta) for odd orbits, (xi, 0) for even ones."""
    if parity is Parity.ODD:
        return np.array([0.0, orbit.eta])
    return np.array([orbit.xi, 0.0])


def _g(x: Union[float, np.ndarray]) -> Union[float, np.ndarray]:
    return 1.0 / (x * x + R0 * R0) ** 1.5


def G_along_orbit(
    parity: Parity,
    mp: FrequencyPair,
    t: Union[float, np.ndarray],
    cfg: Optional[IntegratorConfig] = None,
    orbit: Optional[CircularOrbit] = None,
) -> Union[float, np.ndarray]:
    """G(t) = 1 / (phi(t)^2 + r0^2)^(3/2) along the odd or even (m, p) circular orbit."""
    orbit = orbit or resolve_orbit(mp, cfg)
    times = np.atleast_1d(np.asarray(t, dtype=float))
    x = circular.sample_orbit(orbit_start(orbit, parity), times, cfg)[:, 0]
    values = _g(x)
    return float(values[0]) if np.ndim(t) == 0 else values


def verdict_for(slope: float, tol: float = VERDICT_TOL) -> StabilityClass:
    """Stability predicted for small e > 0 from the sign of tau'(0)."""
    if slope > tol:
        return StabilityClass.HYPERBOLIC
    if slope < -tol:
        return StabilityClass.ELLIPTIC
    return StabilityClass.PARABOLIC_UNDETERMINED


def _slope(
    mp: FrequencyPair, parity: Parity, cfg: Optional[IntegratorConfig]
) -> SlopeReport:
    cfg = cfg or IntegratorConfig()
    orbit = resolve_orbit(mp, cfg)

    def integrand(t: float, y: np.ndarray) -> np.ndarray:
        x, v = y[0], y[1]
        return np.array([_g(x) * math.cos(t), mixed_derivative_te(x, t) * v])

    _, (integral_cos, integral_raw) = integrate_with_quadrature(
        circular.CIRCULAR.rhs,
        orbit_start(orbit, parity),
        integrand,
        (0.0, 2.0 * math.pi * mp.m),
        cfg,
    )
    tau_prime = 0.25 * mp.p * orbit.Tprime * float(integral_cos)
    tau_prime_raw = -mp.p * orbit.Tprime * float(integral_raw)

    gap = abs(tau_prime_raw - tau_prime)
    if gap > PARTS_RTOL * max(1.0, abs(tau_prime)):
        raise IdentityViolation("integration by parts", gap, PARTS_RTOL)

    A_n = None
    if mp.is_resonant:
        A_n = compute_An(mp.resonance_index, cfg, orbit=orbit)

    report = SlopeReport(
        mp=mp,
        parity=parity,
        h=orbit.h,
        eta=orbit.eta,
        xi=orbit.xi,
        period=orbit.T,
        tau_prime=tau_prime,
        tau_prime_raw=tau_prime_raw,
        integral_Gcos=float(integral_cos),
        Tprime=orbit.Tprime,
        A_n=A_n,
        verdict=verdict_for(tau_prime),
        abs_tol=cfg.abs_tol,
        rel_tol=cfg.rel_tol,
    )
    logger.info("%s slope %s: %.12e (%s)", parity.value, mp, tau_prime, report.verdict.value)
    return report


def slope_odd(mp: FrequencyPair, cfg: Optional[IntegratorConfig] = None) -> SlopeReport:
    """
    tau'(0) of the odd (m, p) family.

    The raw form -p T' * integral of d2F/dtde(phi, t) phi' is evaluated in the
    same pass and must agree with the cosine form to a relative 1e-6.
    """
    return _slope(mp, Parity.ODD, cfg)


def slope_even(mp: FrequencyPair, cfg: Optional[IntegratorConfig] = None) -> SlopeReport:
    """tau'(0) of the even (m, p) family."""
    return _slope(mp, Parity.EVEN, cfg)


def slope_for(
    mp: FrequencyPair, parity: Parity, cfg: Optional[IntegratorConfig] = None
) -> SlopeReport:
    return _slope(mp, parity, cfg)


def _check_index(n: int) -> None:
    if n < 1:
        raise PreconditionViolated(f"n must be >= 1, got {n!r}")


def compute_An(
    n: int, cfg: Optional[IntegratorConfig] = None, orbit: Optional[CircularOrbit] = None
) -> float:
    """
    A_n = integral over [0, n*pi] of G_n(t) cos t along the odd (2n, 1) orbit.

    The integral over [n*pi, 2n*pi] is accumulated in the same sweep and must
    match the first half to 1e-8.
    """
    _check_index(n)
    orbit = orbit or resolve_orbit(FrequencyPair(m=2 * n, p=1), cfg)

    def integrand(t: float, y: np.ndarray) -> float:
        return float(_g(y[0]) * math.cos(t))

    half = math.pi * n
    first, A_n = integrate_with_quadrature(
        circular.CIRCULAR.rhs, [0.0, orbit.eta], integrand, (0.0, half), cfg
    )
    _, second = integrate_with_quadrature(
        circular.CIRCULAR.rhs, first.y, integrand, (half, 2.0 * half), cfg
    )
    gap = abs(float(A_n) - float(second))
    if gap > FOLD_TOL:
        raise IdentityViolation(f"A_{n} half-period symmetry", gap, FOLD_TOL)
    return float(A_n)


def folded_An(
    n: int, cfg: Optional[IntegratorConfig] = None, orbit: Optional[CircularOrbit] = None
) -> float:
    """
    A_n from its folded alternating form

        sum over i of (-1)^(i-1) * integral over [0, pi/2] of
        (G_n(t + (i-1) pi) - G_n(i pi - t)) cos t,

    by adaptive quadrature on the dense orbit. For n = 1 the integrand is
    positive because G_1 decreases on [0, pi].
    """
    _check_index(n)
    orbit = orbit or resolve_orbit(FrequencyPair(m=2 * n, p=1), cfg)
    run = integrate(
        circular.CIRCULAR.rhs, [0.0, orbit.eta], (0.0, math.pi * n), cfg, keep_dense=True
    )

    def G(t: float) -> float:
        return float(_g(run.dense(t)[0]))

    def folded(t: float, i: int) -> float:
        return (G(t + (i - 1) * math.pi) - G(i * math.pi - t)) * math.cos(t)

    total = 0.0
    for i in range(1, n + 1):
        piece, _ = quad(
            folded,
            0.0,
            0.5 * math.pi,
            epsabs=1e-12,
            epsrel=1e-12,
            args=(i,),
            limit=200,
        )
        total += (-1) ** (i - 1) * piece
    return total


def vanishing_check(
    mp: FrequencyPair, parity: Parity, cfg: Optional[IntegratorConfig] = None
) -> VanishingReport:
    """
    Slope of a non-resonant family; it must vanish.

    Raises:
        PreconditionViolated: if m/(2p) is an integer
        IdentityViolation: if |tau'(0)| exceeds 1e-7
    """
    if mp.is_resonant:
        raise PreconditionViolated(f"{mp} is resonant: m/(2p) = {mp.resonance_index}")
    report = _slope(mp, parity, cfg)
    residual = abs(report.tau_prime)
    g_period = math.pi * mp.m / mp.p
    result = VanishingReport(
        mp=mp,
        parity=parity,
        residual=residual,
        tolerance=VANISHING_TOL,
        g_period=g_period,
        explanation=(
            f"G has period {mp.m}pi/{mp.p}; its Fourier modes are multiples of "
            f"{2 * mp.p}/{mp.m}, and 1 is not among them, so cos t integrates to zero"
        ),
    )
    if residual > VANISHING_TOL:
        raise IdentityViolation(f"vanishing slope of {mp}", residual, VANISHING_TOL)
    return result


def parity_relation_check(
    n: int, p: int, cfg: Optional[IntegratorConfig] = None
) -> Tuple[float, float, float]:
    """
    Even slope against (-1)^n times the odd slope at (2pn, p).

    Returns:
        (even slope, (-1)^n odd slope, relative residual)
    """
    _check_index(n)
    mp = FrequencyPair.of(2 * p * n, p)
    lhs = slope_even(mp, cfg).tau_prime
    rhs = (-1) ** n * slope_odd(mp, cfg).tau_prime
    residual = abs(lhs - rhs) / max(abs(rhs), 1e-300)
    return lhs, rhs, residual


def predicted_verdicts(n: int, A_n: float) -> Tuple[StabilityClass, StabilityClass]:
    """
    Stability of the odd and even resonant families implied by the sign of A_n.

    The odd slope has the sign of A_n; the even slope the sign of (-1)^n A_n.
    """
    return verdict_for(A_n), verdict_for((-1) ** n * A_n)


def g_monotonicity(
    n: int, samples: int = 200, cfg: Optional[IntegratorConfig] = None
) -> float:
    """Largest increment of G_n between consecutive samples of [0, n*pi]; negative if decreasing."""
    _check_index(n)
    times = np.linspace(0.0, math.pi * n, samples)
    values = G_along_orbit(Parity.ODD, FrequencyPair(m=2 * n, p=1), times, cfg)
    return float(np.max(np.diff(values)))


def scan_row(
    n: int,
    cfg: IntegratorConfig,
    reference: Optional[ReferenceTable] = None,
    certify: bool = True,
) -> ScanRow:
    """One row (n, eta_n, h_n, A_n) of the A_n scan."""
    orbit = resolve_orbit(FrequencyPair(m=2 * n, p=1), cfg)
    A_n = compute_An(n, cfg, orbit=orbit)
    certificate = abs(A_n - compute_An(n, cfg.halved())) if certify else None
    odd_verdict, even_verdict = predicted_verdicts(n, A_n)

    row = ScanRow(
        n=n,
        eta=orbit.eta,
        h=orbit.h,
        A_n=A_n,
        sign=int(np.sign(A_n)),
        certificate=certificate,
        certified=None if certificate is None else certificate <= CERTIFICATE_TOL,
        odd_verdict=odd_verdict,
        even_verdict=even_verdict,
        abs_tol=cfg.abs_tol,
        rel_tol=cfg.rel_tol,
    )
    ref = reference.find(n) if reference is not None else None
    if ref is not None:
        row = row.model_copy(
            update={
                "ref_eta": ref.eta,
                "ref_h": ref.h,
                "ref_A": ref.A,
                "dev_eta": abs(row.eta - ref.eta),
                "dev_h": abs(row.h - ref.h),
                "dev_A": abs(row.A_n - ref.A),
            }
        )
    if A_n <= 0:
        logger.warning("A_%d = %.10f is not positive", n, A_n)
    logger.info("A_%d = %.10f (certificate %s)", n, A_n, certificate)
    return row


def conjecture_scan(
    n_max: int,
    cfg: Optional[IntegratorConfig] = None,
    reference: Optional[ReferenceTable] = None,
    workers: int = 1,
    certify: bool = True,
) -> List[ScanRow]:
    """
    Rows n = 1..n_max of (eta_n, h_n, A_n, sign).

    Each A_n carries a self-convergence certificate, the change under halved
    tolerances. Rows with a reference entry also carry absolute deviations.
    Signs are reported, not asserted.
    """
    _check_index(n_max)
    cfg = cfg or IntegratorConfig()
    row = functools.partial(scan_row, cfg=cfg, reference=reference, certify=certify)
    return ordered_map(row, range(1, n_max + 1), workers)
