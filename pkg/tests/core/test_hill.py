"""
Unit tests for Hill equation tooling.
"""

import math

import numpy as np
import pytest

from sitnikov.core.errors import DeterminantViolation, PreconditionViolated, VelocityOutOfRange
from sitnikov.core.hill import (
    HillSystem,
    classify,
    fundamental_path,
    fundamental_solutions,
    half_period_structure,
    harmonic_trace,
    orbit_stability,
    perturbed,
    trace_derivative,
    trace_frechet_kernel,
    verify_psi_identities,
)
from sitnikov.core.models import IntegratorConfig, Monodromy2x2, StabilityClass
from sitnikov.problems import circular
from tests.fixtures.orbits import resonant_orbit


TIGHT = IntegratorConfig(abs_tol=1e-13, rel_tol=1e-13)


def matrix(a, b, c, d):
    return Monodromy2x2(a=a, b=b, c=c, d=d, length=1.0)


def trace_of(sys, cfg=None):
    return fundamental_solutions(sys, sys.T, cfg).trace


class TestHillSystem:
    """Test construction of Hill systems."""

    def test_needs_exactly_one_source(self):
        """Test that q and a driving problem are exclusive."""
        with pytest.raises(PreconditionViolated):
            HillSystem(1.0)
        with pytest.raises(PreconditionViolated):
            HillSystem(1.0, q=lambda t: 1.0, problem=circular.CIRCULAR, y0=[0.0, 1.0])
        with pytest.raises(PreconditionViolated):
            HillSystem(1.0, problem=circular.CIRCULAR)

    def test_rejects_non_positive_period(self):
        """Test the period precondition."""
        with pytest.raises(PreconditionViolated):
            HillSystem.from_function(lambda t: 1.0, 0.0)

    def test_periodic_function(self):
        """Test q(t + T) = q(t) for an explicit potential."""
        sys = HillSystem.from_function(lambda t: 1.0 + 0.1 * math.cos(t), 2 * math.pi)
        assert sys.periodicity_residual() <= 1e-10
        assert not sys.driven
        assert sys.offset == 0

    def test_potential_along_orbit(self):
        """Test that the driven potential is f'(x(t)) and repeats with the orbit."""
        eta = 1.5
        T = circular.period(circular.energy_from_eta(eta))
        sys = HillSystem.along_orbit(circular.CIRCULAR, [0.0, eta], T)
        assert sys.driven
        assert sys.potential_samples([0.0])[0] == pytest.approx(circular.force_prime(0.0))
        assert sys.periodicity_residual() <= 1e-8


class TestFundamentalSolutions:
    """Test Poincare matrices."""

    def test_free_particle(self):
        """Test q = 0, where the matrix is [[1, t], [0, 1]]."""
        mono = fundamental_solutions(HillSystem.from_function(lambda t: 0.0, 3.0), 3.0)
        np.testing.assert_allclose(mono.as_array(), [[1.0, 3.0], [0.0, 1.0]], atol=1e-12)

    def test_harmonic_full_turn(self):
        """Test q = 1 over 2 pi, where the matrix is the identity."""
        sys = HillSystem.from_function(lambda t: 1.0, 2 * math.pi)
        mono = fundamental_solutions(sys, 2 * math.pi)
        np.testing.assert_allclose(mono.as_array(), np.eye(2), atol=1e-9)
        assert classify(mono) is StabilityClass.PARABOLIC_STABLE

    @pytest.mark.parametrize("omega_sq", [0.3, 2.0, -0.5])
    def test_constant_potential_trace(self, omega_sq):
        """Test the trace against its closed form."""
        sys = HillSystem.from_function(lambda t: omega_sq, 2.5)
        assert trace_of(sys) == pytest.approx(harmonic_trace(omega_sq, 2.5), abs=1e-9)

    def test_unit_determinant(self):
        """Test Liouville's formula on a non-constant potential."""
        sys = HillSystem.from_function(lambda t: 2.0 + math.cos(t), 2 * math.pi)
        assert abs(fundamental_solutions(sys, 2 * math.pi).det - 1.0) < 1e-8

    def test_odd_orbit_half_period(self):
        """Test psi1(T/2) = -1 and psi1'(T/2) = 0 along the (2, 1) odd orbit."""
        orbit = resonant_orbit(1)
        sys = HillSystem.along_orbit(circular.CIRCULAR, [0.0, orbit.eta], orbit.T)
        mono = fundamental_solutions(sys, 0.5 * orbit.T)
        assert mono.a == pytest.approx(-1.0, abs=1e-6)
        assert mono.c == pytest.approx(0.0, abs=1e-6)
        assert abs(mono.det - 1.0) < 1e-8

    def test_path_rejects_negative_times(self):
        """Test the time precondition of fundamental_path."""
        sys = HillSystem.from_function(lambda t: 1.0, 1.0)
        with pytest.raises(PreconditionViolated):
            fundamental_path(sys, [-0.1, 0.5])

    def test_path_of_driven_system(self):
        """Test that driven paths carry the trajectory in front."""
        eta = 1.5
        sys = HillSystem.along_orbit(circular.CIRCULAR, [0.0, eta], 1.0)
        path = fundamental_path(sys, [0.0, 0.5])
        assert path.shape == (2, 6)
        np.testing.assert_allclose(path[0], [0.0, eta, 1.0, 0.0, 0.0, 1.0])


class TestClassify:
    """Test stability classification."""

    def test_elliptic(self):
        """Test a rotation."""
        assert classify(matrix(0.0, 1.0, -1.0, 0.0)) is StabilityClass.ELLIPTIC

    def test_hyperbolic(self):
        """Test trace 3."""
        assert classify(matrix(2.0, 1.0, 1.0, 1.0)) is StabilityClass.HYPERBOLIC

    def test_negative_trace(self):
        """Test that the sign of the trace does not matter."""
        assert classify(matrix(-2.0, 1.0, 1.0, -1.0)) is StabilityClass.HYPERBOLIC

    def test_parabolic_stable(self):
        """Test plus and minus the identity."""
        assert classify(matrix(1.0, 0.0, 0.0, 1.0)) is StabilityClass.PARABOLIC_STABLE
        assert classify(matrix(-1.0, 0.0, 0.0, -1.0)) is StabilityClass.PARABOLIC_STABLE

    def test_parabolic_unstable(self):
        """Test a shear."""
        assert classify(matrix(1.0, 1.0, 0.0, 1.0)) is StabilityClass.PARABOLIC_UNSTABLE
        assert classify(matrix(-1.0, 0.0, 3.0, -1.0)) is StabilityClass.PARABOLIC_UNSTABLE

    def test_parabolic_undetermined(self):
        """Test trace 2 with both off-diagonal entries nonzero."""
        s = 1e-2
        mono = matrix(1.0 + s, s, -s, 1.0 - s)
        assert mono.det == pytest.approx(1.0)
        assert classify(mono) is StabilityClass.PARABOLIC_UNDETERMINED

    def test_determinant_violation(self):
        """Test that a non-unimodular matrix is rejected."""
        with pytest.raises(DeterminantViolation):
            classify(matrix(2.0, 0.0, 0.0, 1.0))


class TestTraceDerivative:
    """Test the Frechet kernel of the trace."""

    def test_free_particle_kernel(self):
        """Test K(s) = -T when q = 0."""
        sys = HillSystem.from_function(lambda t: 0.0, 3.0)
        kernel = trace_frechet_kernel(sys, [0.0, 1.0, 2.5, 3.0])
        np.testing.assert_allclose(kernel, -3.0, atol=1e-10)

    def test_kernel_rejects_points_outside_period(self):
        """Test the domain of the kernel."""
        sys = HillSystem.from_function(lambda t: 0.0, 3.0)
        with pytest.raises(PreconditionViolated):
            trace_frechet_kernel(sys, 3.5)

    def test_constant_direction(self):
        """Test d/de 2 cos(sqrt(1 + e) T) = -T sin T."""
        sys = HillSystem.from_function(lambda t: 1.0, 3.0)
        assert trace_derivative(sys, lambda t: 1.0) == pytest.approx(-3.0 * math.sin(3.0), abs=1e-8)

    @pytest.mark.parametrize(
        "direction",
        [
            lambda t: 1.0,
            lambda t: math.cos(2 * math.pi * t / 3.0),
            lambda t: t * (3.0 - t),
        ],
        ids=["constant", "cosine", "parabola"],
    )
    def test_difference_quotient_converges_at_first_order(self, direction):
        """Test that (tau(q + e dq) - tau(q)) / e approaches the kernel integral like e."""
        sys = HillSystem.from_function(lambda t: 1.0 + 0.2 * math.sin(t), 3.0)
        exact = trace_derivative(sys, direction, TIGHT)
        base = trace_of(sys, TIGHT)
        errors = [
            abs((trace_of(perturbed(sys, direction, eps), TIGHT) - base) / eps - exact)
            for eps in (1e-3, 5e-4, 2.5e-4)
        ]
        assert errors[0] < 1e-2
        assert 1.6 < errors[0] / errors[1] < 2.4
        assert 1.6 < errors[1] / errors[2] < 2.4

    def test_first_order_convergence(self):
        """Test that the difference quotient error halves with the step."""
        sys = HillSystem.from_function(lambda t: 1.0, 3.0)
        exact = trace_derivative(sys, lambda t: 1.0)
        errors = []
        for eps in (1e-3, 5e-4):
            analytic = harmonic_trace(1.0 + eps, 3.0)
            assert trace_of(perturbed(sys, lambda t: 1.0, eps)) == pytest.approx(
                analytic, abs=1e-9
            )
            errors.append(abs((analytic - trace_of(sys)) / eps - exact))
        assert 1.6 < errors[0] / errors[1] < 2.4

    def test_kernel_along_odd_orbit(self):
        """Test that K(s) reduces to -b psi1(s)^2 when the matrix is a shear."""
        orbit = resonant_orbit(1)
        sys = HillSystem.along_orbit(circular.CIRCULAR, [0.0, orbit.eta], orbit.T)
        mono = fundamental_solutions(sys, orbit.T)
        points = np.linspace(0.0, orbit.T, 5)
        psi1 = fundamental_path(sys, points)[:, 2]
        kernel = trace_frechet_kernel(sys, points)
        np.testing.assert_allclose(kernel, -mono.b * psi1**2, atol=1e-6 * abs(mono.b))

    def test_perturbation_of_driven_system(self):
        """Test that shifts stack on a driven potential."""
        orbit = resonant_orbit(1)
        sys = HillSystem.along_orbit(circular.CIRCULAR, [0.0, orbit.eta], orbit.T)
        shifted = perturbed(perturbed(sys, lambda t: 1.0, 0.1), lambda t: 1.0, 0.2)
        assert shifted.potential(0.0, 0.0) == pytest.approx(circular.force_prime(0.0) + 0.3)


class TestCircularOrbitStructure:
    """Test closed forms of the fundamental solutions along odd circular orbits."""

    def test_psi_identities(self):
        """Test psi1 = S'/eta, psi1' = -f(S)/eta and psi2 = dS/d(eta)."""
        eta = 1.5
        T = circular.period(circular.energy_from_eta(eta))
        report = verify_psi_identities(eta, np.linspace(0.0, T, 9))
        assert report.samples == 9
        assert report.psi1_residual <= 1e-8
        assert report.psi1dot_residual <= 1e-8
        assert report.psi2_residual <= 1e-5
        assert report.passed

    def test_psi_identities_reject_velocity(self):
        """Test the velocity precondition."""
        with pytest.raises(VelocityOutOfRange):
            verify_psi_identities(2.0, [0.0, 1.0])

    @pytest.mark.parametrize("n", [1, 2, 3, 4])
    def test_half_period_structure(self, n):
        """Test the shape of the matrix over n half periods."""
        eta = resonant_orbit(1).eta
        result = half_period_structure(eta, n)
        sign = (-1) ** n
        assert result.monodromy.a == pytest.approx(sign, abs=1e-6)
        assert result.monodromy.d == pytest.approx(sign, abs=1e-6)
        assert result.b_n == pytest.approx(-sign * n * result.b_hat, rel=1e-5)
        assert result.b_hat > 0
        assert result.period_residual <= 1e-4

    def test_half_period_powers(self):
        """Test P(nT/2) = P(T/2)^n."""
        orbit = resonant_orbit(1)
        sys = HillSystem.along_orbit(circular.CIRCULAR, [0.0, orbit.eta], orbit.T)
        half = fundamental_solutions(sys, 0.5 * orbit.T).as_array()
        for n in (2, 3, 4):
            full = fundamental_solutions(sys, 0.5 * n * orbit.T).as_array()
            np.testing.assert_allclose(full, np.linalg.matrix_power(half, n), rtol=1e-8, atol=1e-6)

    def test_half_period_structure_rejects_index(self):
        """Test n >= 1."""
        with pytest.raises(PreconditionViolated):
            half_period_structure(1.5, 0)

    def test_odd_circular_orbits_are_parabolic(self):
        """Test that the full-period matrix is a nontrivial shear."""
        mono, cls = orbit_stability(1.5)
        assert mono.trace == pytest.approx(2.0, abs=1e-6)
        assert cls is StabilityClass.PARABOLIC_UNSTABLE
