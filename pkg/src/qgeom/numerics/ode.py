"""Adaptive ODE integration for autonomous vector fields."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np
from scipy.integrate import solve_ivp

from qgeom.errors import InputError, StiffnessError

DEFAULT_TOL = 1e-10
# Local error control is run this much tighter than the requested global tolerance.
LOCAL_SAFETY = 0.01


@dataclass(frozen=True)
class Trajectory:
    """Sampled solution; ``states[k]`` is the state at ``times[k]``."""

    times: np.ndarray
    states: np.ndarray
    tolerance: float

    def __post_init__(self):
        t = np.asarray(self.times, dtype=float)
        if t.ndim != 1 or len(t) != len(self.states):
            raise InputError("times and states must have equal length")
        if np.any(np.diff(t) <= 0):
            raise InputError("times must be strictly increasing")

    @property
    def final(self) -> np.ndarray:
        return self.states[-1]

    def map(self, fn: Callable) -> "Trajectory":
        return Trajectory(self.times, np.array([fn(s) for s in self.states]), self.tolerance)


def integrate(
    field: Callable[[np.ndarray], np.ndarray],
    p0,
    T: float,
    tol: float = DEFAULT_TOL,
    method: str = "DOP853",
    max_step: float = np.inf,
) -> Trajectory:
    """Integrate ``dp/dt = field(p)`` from ``t = 0`` to ``t = T``.

    Dormand-Prince 8(5,3) with ``rtol = atol = LOCAL_SAFETY * tol`` so that
    the global error over moderate horizons stays within a few ``tol``.  Returns every
    accepted step, both endpoints included; ``T = 0`` yields the single
    initial sample.
    """
    if not tol > 0:
        raise InputError("tol must be positive")
    if T < 0:
        raise InputError("integration time must be non-negative")
    y0 = np.asarray(p0, dtype=float).copy()
    if T == 0:
        return Trajectory(np.array([0.0]), y0[None, :], tol)
    sol = solve_ivp(
        lambda t, y: np.asarray(field(y), dtype=float),
        (0.0, float(T)),
        y0,
        method=method,
        rtol=LOCAL_SAFETY * tol,
        atol=LOCAL_SAFETY * tol,
        max_step=max_step,
    )
    if sol.status != 0:
        raise StiffnessError(f"integration stopped at t={sol.t[-1]:.6g}: {sol.message}")
    return Trajectory(sol.t, sol.y.T.copy(), tol)


def rk4_flow(field: Callable, p, t: float, substeps: int = 2):
    """Flow map φ_t(p) by fixed-step classical Runge-Kutta.

    Uses only ring operations, so ``p`` may carry dual numbers; this is how
    tangent maps ``Dφ_t`` are obtained exactly for short times.
    """
    h = t / substeps
    y = np.array(p, dtype=object) if _has_objects(p) else np.asarray(p, dtype=float)
    for _ in range(substeps):
        k1 = np.asarray(field(y))
        k2 = np.asarray(field(y + k1 * (h / 2)))
        k3 = np.asarray(field(y + k2 * (h / 2)))
        k4 = np.asarray(field(y + k3 * h))
        y = y + (k1 + k2 * 2 + k3 * 2 + k4) * (h / 6)
    return y


def _has_objects(p) -> bool:
    return isinstance(p, np.ndarray) and p.dtype == object
