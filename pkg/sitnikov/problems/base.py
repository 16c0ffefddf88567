"""
Base class for scalar Newtonian equations x'' + F(x, t) = 0.
"""

from abc import ABC, abstractmethod

import numpy as np


class NewtonianProblem(ABC):
    """
    A scalar equation x'' + F(x, t) = 0 together with its linearization.

    States are laid out as (x, v) and, for the variational system, as
    (x, v, y1, y1', y2, y2', ...) where each (y, y') column solves the Hill
    equation y'' + dF/dx(x(t), t) y = 0 along the trajectory.
    """

    def __init__(self, name: str) -> None:
        self.name = name

    @abstractmethod
    def force(self, x: float, t: float) -> float:
        """F(x, t)."""

    @abstractmethod
    def stiffness(self, x: float, t: float) -> float:
        """dF/dx at (x, t), the Hill potential along a trajectory."""

    def rhs(self, t: float, y: np.ndarray) -> np.ndarray:
        """First-order field (x', v') = (v, -F(x, t))."""
        return np.array([y[1], -self.force(y[0], t)])

    def variational_rhs(self, t: float, z: np.ndarray) -> np.ndarray:
        """Trajectory and any number of linearized columns, integrated jointly."""
        x = z[0]
        q = self.stiffness(x, t)
        out = np.empty_like(z)
        out[0] = z[1]
        out[1] = -self.force(x, t)
        out[2::2] = z[3::2]
        out[3::2] = -q * z[2::2]
        return out

    def __repr__(self) -> str:
        return f"{type(self).__name__}(name={self.name!r})"
