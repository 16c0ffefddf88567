"""
Adaptive explicit Runge-Kutta integration with event location and quadrature.

Every trajectory in the toolkit goes through this module. Stepping is done by
scipy's Dormand-Prince 8(5,3) pair, one accepted step at a time, so that the
step budget, finiteness of the state and events can be checked between steps.
"""

import logging
from typing import Callable, Iterator, List, Optional, Sequence, Tuple, Union

import numpy as np
from pydantic import BaseModel, ConfigDict
from scipy.integrate import DOP853, OdeSolution
from scipy.optimize import brentq

from .errors import EventNotFound, NonFiniteState, NumericalError, StepLimitExceeded
from .models import EventSpec, IntegratorConfig, PhaseState

logger = logging.getLogger(__name__)

VectorField = Callable[[float, np.ndarray], np.ndarray]
Integrand = Callable[[float, np.ndarray], Union[float, np.ndarray]]

_ROOT_RTOL = 4.0 * np.finfo(float).eps
_ROOT_XTOL = 1e-14


class Trajectory(BaseModel):
    """Result of an integration: terminal state plus optional samples."""

    model_config = ConfigDict(arbitrary_types_allowed=True)

    t: float
    y: np.ndarray
    steps: int
    sample_times: Optional[np.ndarray] = None
    samples: Optional[np.ndarray] = None
    dense: Optional[OdeSolution] = None

    def state(self) -> PhaseState:
        """Terminal (t, x, v) of a second-order scalar equation."""
        return PhaseState.from_vector(self.t, self.y)


def _checked_field(rhs: VectorField) -> VectorField:
    def fun(t: float, y: np.ndarray) -> np.ndarray:
        value = np.asarray(rhs(t, y), dtype=float)
        if not np.all(np.isfinite(value)):
            raise NonFiniteState(f"vector field is not finite at t={t!r}")
        return value

    return fun


def _as_state(y0: Union[Sequence[float], np.ndarray]) -> np.ndarray:
    y = np.array(y0, dtype=float).reshape(-1)
    if not np.all(np.isfinite(y)):
        raise NonFiniteState("initial state is not finite")
    return y


def _solver(
    rhs: VectorField, t0: float, y0: np.ndarray, t_bound: float, cfg: IntegratorConfig
) -> DOP853:
    return DOP853(
        _checked_field(rhs),
        t0,
        y0,
        t_bound,
        max_step=cfg.max_step,
        rtol=cfg.rel_tol,
        atol=cfg.abs_tol,
    )


def _advance(solver: DOP853, cfg: IntegratorConfig) -> Iterator[int]:
    """Yield after every accepted step until the solver reaches its bound."""
    steps = 0
    while solver.status == "running":
        if steps >= cfg.max_steps:
            raise StepLimitExceeded(
                f"step budget of {cfg.max_steps} exhausted at t={solver.t!r}"
            )
        message = solver.step()
        if solver.status == "failed":
            raise NumericalError(f"integration failed at t={solver.t!r}: {message}")
        if not np.all(np.isfinite(solver.y)):
            raise NonFiniteState(f"state is not finite at t={solver.t!r}")
        steps += 1
        yield steps


def integrate(
    rhs: VectorField,
    y0: Union[Sequence[float], np.ndarray],
    t_span: Tuple[float, float],
    cfg: Optional[IntegratorConfig] = None,
    t_eval: Optional[Sequence[float]] = None,
    keep_dense: bool = False,
) -> Trajectory:
    """
    Integrate y' = rhs(t, y) over t_span.

    The span may run backwards. The terminal state is taken exactly at the end
    of the span.

    Args:
        rhs: Vector field
        y0: Initial state
        t_span: (start, end) times
        cfg: Integrator tolerances and limits
        t_eval: Times inside the span at which to sample the dense output
        keep_dense: Keep the piecewise dense interpolant of the whole run

    Returns:
        Trajectory with the terminal state and requested samples
    """
    cfg = cfg or IntegratorConfig()
    t0, t1 = float(t_span[0]), float(t_span[1])
    y = _as_state(y0)

    sample_times = None if t_eval is None else np.asarray(t_eval, dtype=float)
    if sample_times is not None:
        lo, hi = min(t0, t1), max(t0, t1)
        if np.any((sample_times < lo) | (sample_times > hi)):
            raise ValueError("sample times must lie inside the integration span")

    if t1 == t0:
        samples = None
        if sample_times is not None:
            samples = np.tile(y, (sample_times.size, 1))
        return Trajectory(t=t1, y=y, steps=0, sample_times=sample_times, samples=samples)

    solver = _solver(rhs, t0, y, t1, cfg)
    samples_out = None if sample_times is None else np.empty((sample_times.size, y.size))
    pending = None if sample_times is None else np.ones(sample_times.size, dtype=bool)
    knots: List[float] = [t0]
    interpolants = []
    steps = 0

    for steps in _advance(solver, cfg):
        need_samples = pending is not None and pending.any()
        if not (need_samples or keep_dense):
            continue
        local = solver.dense_output()
        if keep_dense:
            knots.append(solver.t)
            interpolants.append(local)
        if need_samples:
            lo, hi = sorted((solver.t_old, solver.t))
            inside = pending & (sample_times >= lo) & (sample_times <= hi)
            if inside.any():
                samples_out[inside] = local(sample_times[inside]).T
                pending &= ~inside

    logger.debug("integrated [%g, %g] in %d steps", t0, t1, steps)
    return Trajectory(
        t=t1,
        y=solver.y.copy(),
        steps=steps,
        sample_times=sample_times,
        samples=samples_out,
        dense=OdeSolution(knots, interpolants) if keep_dense else None,
    )


def _crosses(g_old: float, g_new: float, direction: int) -> bool:
    rising = g_old < 0.0 <= g_new
    falling = g_old > 0.0 >= g_new
    if direction > 0:
        return rising
    if direction < 0:
        return falling
    return rising or falling


def integrate_to_event(
    rhs: VectorField,
    y0: Union[Sequence[float], np.ndarray],
    t0: float,
    ev: EventSpec,
    cfg: Optional[IntegratorConfig] = None,
) -> Tuple[float, np.ndarray]:
    """
    Integrate forward from t0 until the ev.nth crossing of ev.event_fn.

    A start exactly on the event surface does not count as a crossing. Each
    crossing is bracketed between accepted steps and refined with Brent's
    method on the step's dense output polynomial.

    Returns:
        (event time, state at the event)
    """
    cfg = cfg or IntegratorConfig()
    y = _as_state(y0)
    solver = _solver(rhs, float(t0), y, float(t0) + ev.horizon, cfg)
    g_old = float(ev.event_fn(float(t0), y))
    found = 0

    try:
        for _ in _advance(solver, cfg):
            g_new = float(ev.event_fn(solver.t, solver.y))
            if _crosses(g_old, g_new, ev.direction):
                local = solver.dense_output()
                t_event = brentq(
                    lambda s: float(ev.event_fn(s, local(s))),
                    solver.t_old,
                    solver.t,
                    xtol=_ROOT_XTOL,
                    rtol=_ROOT_RTOL,
                )
                found += 1
                if found == ev.nth:
                    return float(t_event), np.asarray(local(t_event), dtype=float)
            g_old = g_new
    except StepLimitExceeded as exc:
        raise EventNotFound(f"event {ev.nth} not reached before the step budget: {exc}") from exc

    raise EventNotFound(
        f"found {found} of {ev.nth} requested crossings within {ev.horizon} time units"
    )


def integrate_with_quadrature(
    rhs: VectorField,
    y0: Union[Sequence[float], np.ndarray],
    integrand: Integrand,
    t_span: Tuple[float, float],
    cfg: Optional[IntegratorConfig] = None,
) -> Tuple[Trajectory, Union[float, np.ndarray]]:
    """
    Integrate a trajectory together with the integral of integrand along it.

    The integral is carried as extra components of the state so it shares the
    integrator's error control. A vector-valued integrand yields a vector of
    integrals.

    Returns:
        (trajectory of the original components, accumulated integral)
    """
    y = _as_state(y0)
    dim = y.size
    first = np.asarray(integrand(float(t_span[0]), y), dtype=float)
    scalar = first.ndim == 0
    width = 1 if scalar else first.size

    def augmented(t: float, z: np.ndarray) -> np.ndarray:
        state = z[:dim]
        return np.concatenate(
            (np.asarray(rhs(t, state), dtype=float), np.atleast_1d(integrand(t, state)))
        )

    run = integrate(augmented, np.concatenate((y, np.zeros(width))), t_span, cfg)
    trajectory = Trajectory(t=run.t, y=run.y[:dim], steps=run.steps)
    accumulated = run.y[dim:]
    return trajectory, float(accumulated[0]) if scalar else accumulated


def velocity_event(direction: int = 0, nth: int = 1, horizon: float = 1000.0) -> EventSpec:
    """Event v = 0 for states laid out as (x, v, ...)."""
    return EventSpec(event_fn=lambda t, y: y[1], direction=direction, nth=nth, horizon=horizon)


def position_event(direction: int = 0, nth: int = 1, horizon: float = 1000.0) -> EventSpec:
    """Event x = 0 for states laid out as (x, v, ...)."""
    return EventSpec(event_fn=lambda t, y: y[0], direction=direction, nth=nth, horizon=horizon)
