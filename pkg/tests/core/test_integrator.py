"""
Unit tests for the adaptive integrator.
"""

import math

import numpy as np
import pytest

from sitnikov.core.errors import EventNotFound, NonFiniteState, StepLimitExceeded
from sitnikov.core.integrator import (
    integrate,
    integrate_to_event,
    integrate_with_quadrature,
    position_event,
    velocity_event,
)
from sitnikov.core.models import EventSpec, IntegratorConfig
from sitnikov.problems import circular


def harmonic(t, y):
    return np.array([y[1], -y[0]])


def still(t, y):
    return np.zeros_like(y)


class TestIntegrate:
    """Test fixed-span integration."""

    def test_constant_field(self):
        """Test that a zero field keeps its state."""
        run = integrate(still, [1.0], (0.0, 10.0))
        assert run.t == 10.0
        assert run.y[0] == pytest.approx(1.0, abs=1e-15)

    def test_harmonic_oscillator_full_turn(self):
        """Test return to the initial state after one period."""
        run = integrate(harmonic, [0.0, 1.0], (0.0, 2 * math.pi))
        np.testing.assert_allclose(run.y, [0.0, 1.0], atol=1e-9)
        assert run.steps > 0

    def test_backward_span(self):
        """Test integration with a decreasing span."""
        run = integrate(harmonic, [0.0, 1.0], (0.0, -0.5 * math.pi))
        np.testing.assert_allclose(run.y, [-1.0, 0.0], atol=1e-10)

    def test_empty_span(self):
        """Test that a zero-length span returns the initial state."""
        run = integrate(harmonic, [0.3, 0.4], (1.0, 1.0), t_eval=[1.0])
        np.testing.assert_array_equal(run.y, [0.3, 0.4])
        assert run.steps == 0
        np.testing.assert_array_equal(run.samples, [[0.3, 0.4]])

    def test_time_reversal(self):
        """Test that integrating forward then backward recovers the start."""
        cfg = IntegratorConfig(abs_tol=1e-10, rel_tol=1e-10)
        y0 = np.array([0.2, 0.9])
        forward = integrate(harmonic, y0, (0.0, 1.0), cfg)
        back = integrate(harmonic, forward.y, (1.0, 0.0), cfg)
        np.testing.assert_allclose(back.y, y0, atol=100 * cfg.abs_tol)

    def test_self_convergence(self):
        """Test that halving the tolerances barely moves the end state."""
        cfg = IntegratorConfig(abs_tol=1e-10, rel_tol=1e-10)
        coarse = integrate(harmonic, [0.0, 1.0], (0.0, math.pi), cfg)
        fine = integrate(harmonic, [0.0, 1.0], (0.0, math.pi), cfg.halved())
        assert np.max(np.abs(coarse.y - fine.y)) < 10 * cfg.abs_tol

    def test_samples(self):
        """Test dense sampling at requested times."""
        times = np.linspace(0.0, 3.0, 7)
        run = integrate(harmonic, [0.0, 1.0], (0.0, 3.0), t_eval=times)
        np.testing.assert_allclose(run.samples[:, 0], np.sin(times), atol=1e-10)
        np.testing.assert_allclose(run.samples[:, 1], np.cos(times), atol=1e-10)

    def test_samples_outside_span(self):
        """Test that sample times must lie inside the span."""
        with pytest.raises(ValueError):
            integrate(harmonic, [0.0, 1.0], (0.0, 1.0), t_eval=[2.0])

    def test_keep_dense(self):
        """Test the global dense interpolant."""
        run = integrate(harmonic, [0.0, 1.0], (0.0, math.pi), keep_dense=True)
        np.testing.assert_allclose(run.dense(0.5 * math.pi), [1.0, 0.0], atol=1e-8)

    def test_step_limit(self):
        """Test the step budget."""
        cfg = IntegratorConfig(max_steps=3)
        with pytest.raises(StepLimitExceeded):
            integrate(harmonic, [0.0, 1.0], (0.0, 100.0), cfg)

    def test_non_finite_field(self):
        """Test that a NaN in the field is reported."""

        def broken(t, y):
            return np.array([np.nan, 0.0])

        with pytest.raises(NonFiniteState):
            integrate(broken, [0.0, 1.0], (0.0, 1.0))

    def test_non_finite_initial_state(self):
        """Test that a NaN initial state is rejected."""
        with pytest.raises(NonFiniteState):
            integrate(harmonic, [np.inf, 0.0], (0.0, 1.0))

    def test_terminal_phase_state(self):
        """Test conversion of the end state."""
        state = integrate(harmonic, [0.0, 1.0], (0.0, 0.5 * math.pi)).state()
        assert state.t == pytest.approx(0.5 * math.pi)
        assert state.x == pytest.approx(1.0, abs=1e-10)


class TestEvents:
    """Test event location."""

    def test_first_turning_point(self):
        """Test the first falling zero of the velocity."""
        t, y = integrate_to_event(harmonic, [0.0, 1.0], 0.0, velocity_event(direction=-1))
        assert t == pytest.approx(0.5 * math.pi, abs=1e-12)
        assert y[0] == pytest.approx(1.0, abs=1e-10)

    def test_nth_crossing(self):
        """Test counting crossings in either direction."""
        t1, _ = integrate_to_event(harmonic, [0.0, 1.0], 0.0, velocity_event(nth=1))
        t2, _ = integrate_to_event(harmonic, [0.0, 1.0], 0.0, velocity_event(nth=2))
        assert t1 < t2
        assert t2 == pytest.approx(1.5 * math.pi, abs=1e-11)

    def test_start_on_surface_is_not_a_crossing(self):
        """Test that x = 0 at t0 is skipped."""
        t, _ = integrate_to_event(harmonic, [0.0, 1.0], 0.0, position_event())
        assert t == pytest.approx(math.pi, abs=1e-11)

    def test_rising_direction(self):
        """Test the direction filter."""
        t, _ = integrate_to_event(harmonic, [0.0, 1.0], 0.0, position_event(direction=1))
        assert t == pytest.approx(2 * math.pi, abs=1e-11)

    def test_event_not_found(self):
        """Test an event that never fires."""
        ev = EventSpec(event_fn=lambda t, y: y[0] - 5.0, horizon=50.0)
        with pytest.raises(EventNotFound):
            integrate_to_event(harmonic, [0.0, 1.0], 0.0, ev)

    def test_event_beyond_step_budget(self):
        """Test that a step budget exhausted before the event is reported."""
        cfg = IntegratorConfig(max_steps=2)
        with pytest.raises(EventNotFound):
            integrate_to_event(harmonic, [0.0, 1.0], 0.0, velocity_event(nth=50), cfg)

    def test_quarter_period_of_circular_orbit(self):
        """Test the turning point of a Sitnikov orbit against the period."""
        h = -0.5
        eta = circular.eta_from_energy(h)
        t, _ = integrate_to_event(
            circular.CIRCULAR.rhs, [0.0, eta], 0.0, velocity_event(direction=-1)
        )
        assert 4 * t == pytest.approx(circular.period(h), rel=1e-12)


class TestQuadrature:
    """Test integrals carried along a trajectory."""

    def test_length_of_span(self):
        """Test the integral of one."""
        _, value = integrate_with_quadrature(still, [0.0], lambda t, y: 1.0, (0.0, 5.0))
        assert value == pytest.approx(5.0, abs=1e-12)

    def test_cosine_over_full_turn(self):
        """Test an integral that vanishes."""
        _, value = integrate_with_quadrature(
            still, [0.0], lambda t, y: math.cos(t), (0.0, 2 * math.pi)
        )
        assert abs(value) < 1e-10

    def test_integral_along_trajectory(self):
        """Test the integral of x^2 along sin t over [0, pi]."""
        run, value = integrate_with_quadrature(
            harmonic, [0.0, 1.0], lambda t, y: y[0] * y[0], (0.0, math.pi)
        )
        assert value == pytest.approx(0.5 * math.pi, abs=1e-10)
        assert run.y.shape == (2,)
        assert run.y[1] == pytest.approx(-1.0, abs=1e-10)

    def test_vector_integrand(self):
        """Test several integrals in one pass."""
        _, values = integrate_with_quadrature(
            harmonic,
            [0.0, 1.0],
            lambda t, y: np.array([y[0], y[1]]),
            (0.0, 0.5 * math.pi),
        )
        np.testing.assert_allclose(values, [1.0, 1.0], atol=1e-10)
