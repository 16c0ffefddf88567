"""
Unit tests for the Kepler solver and the primaries' separation.
"""

import math

import numpy as np
import pytest
from scipy.optimize import bisect

from sitnikov.core.errors import EccentricityOutOfRange
from sitnikov.core.kepler import KEPLER_TOL, radius, radius_de, radius_dt, solve_kepler


class TestSolveKepler:
    """Test u - e sin u = t."""

    def test_circular_case(self):
        """Test that e = 0 returns the mean anomaly."""
        assert solve_kepler(1.234, 0.0) == 1.234

    def test_half_turn(self):
        """Test the fixed point at pi."""
        assert solve_kepler(math.pi, 0.7) == pytest.approx(math.pi, abs=1e-13)

    def test_against_bisection(self):
        """Test a generic point against a bracketing root finder."""
        u = solve_kepler(1.0, 0.5)
        oracle = bisect(lambda s: s - 0.5 * math.sin(s) - 1.0, 0.0, 2.0, xtol=1e-15)
        assert abs(u - 0.5 * math.sin(u) - 1.0) <= KEPLER_TOL
        assert u == pytest.approx(oracle, abs=1e-12)

    def test_residual_grid(self):
        """Test the residual over a grid of anomalies and eccentricities."""
        for e in np.linspace(0.0, 0.99, 12):
            for t in np.linspace(0.0, 2 * math.pi, 25):
                u = solve_kepler(float(t), float(e))
                assert abs(u - e * math.sin(u) - t) <= KEPLER_TOL

    def test_oddness(self):
        """Test u(-t) = -u(t)."""
        for t in (0.3, 1.7, 2.9, 5.0):
            assert solve_kepler(-t, 0.4) == pytest.approx(-solve_kepler(t, 0.4), abs=1e-12)

    def test_shift(self):
        """Test u(t + 2 pi) = u(t) + 2 pi."""
        for t in (0.3, 1.7, 4.4):
            shifted = solve_kepler(t + 2 * math.pi, 0.6)
            assert shifted == pytest.approx(solve_kepler(t, 0.6) + 2 * math.pi, abs=1e-12)

    def test_array_input(self):
        """Test that arrays are solved elementwise."""
        times = np.array([0.1, 1.0, 3.0, 7.0])
        values = solve_kepler(times, 0.3)
        assert values.shape == times.shape
        for t, u in zip(times, values):
            assert u == pytest.approx(solve_kepler(float(t), 0.3), abs=1e-15)

    @pytest.mark.parametrize("e", [1.0, 1.5, -0.1])
    def test_eccentricity_out_of_range(self, e):
        """Test the [0, 1) precondition."""
        with pytest.raises(EccentricityOutOfRange):
            solve_kepler(1.0, e)


class TestRadius:
    """Test r(t, e) and its derivatives."""

    def test_circular_radius(self):
        """Test r = r0 when e = 0."""
        assert radius(2.0, 0.0) == pytest.approx(0.5)

    def test_apsides(self):
        """Test pericenter and apocenter separations."""
        assert radius(0.0, 0.3) == pytest.approx(0.35)
        assert radius(math.pi, 0.3) == pytest.approx(0.65)

    def test_even_and_periodic(self):
        """Test r(-t) = r(t) and r(t + 2 pi) = r(t)."""
        for t in (0.4, 1.9, 3.3):
            assert radius(-t, 0.2) == pytest.approx(radius(t, 0.2), abs=1e-14)
            assert radius(t + 2 * math.pi, 0.2) == pytest.approx(radius(t, 0.2), abs=1e-13)

    def test_radius_de(self):
        """Test dr/de at e = 0 against its closed form and a one-sided difference."""
        assert radius_de(0.0) == pytest.approx(-0.5)
        assert radius_de(0.5 * math.pi) == pytest.approx(0.0, abs=1e-15)
        delta = 1e-6
        t = 1.0
        difference = (-3 * radius(t, 0.0) + 4 * radius(t, delta) - radius(t, 2 * delta)) / (
            2 * delta
        )
        assert radius_de(t) == pytest.approx(difference, abs=1e-8)

    def test_radius_dt(self):
        """Test dr/dt against a centered difference."""
        delta = 1e-6
        for t in (0.3, 2.0, 4.0):
            difference = (radius(t + delta, 0.4) - radius(t - delta, 0.4)) / (2 * delta)
            assert radius_dt(t, 0.4) == pytest.approx(difference, abs=1e-8)

    def test_radius_dt_circular(self):
        """Test that the circular separation is constant."""
        assert radius_dt(1.3, 0.0) == 0.0
