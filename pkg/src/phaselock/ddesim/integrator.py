"""Fixed-step Runge-Kutta method of steps for systems with constant delays.

States are stored on a uniform time grid together with their derivatives, so
the solution between nodes is the cubic Hermite interpolant. Delayed lookups
use that interpolant, which keeps the scheme fourth order as long as the step
does not exceed the shortest positive delay.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from ..errors import NonFinite, StepTooLarge


@dataclass(frozen=True)
class DdeSystem:
    """x'(t) = rhs(t, x(t), [x(t - d) for d in delays])."""

    dimension: int
    delays: Sequence[float]
    rhs: Callable

    def __post_init__(self):
        if any(d < 0 for d in self.delays):
            raise ValueError("delays must be non-negative")
        object.__setattr__(self, "delays", tuple(float(d) for d in self.delays))


def _hermite(y0, y1, f0, f1, theta, dt):
    t2, t3 = theta * theta, theta * theta * theta
    h00 = 2 * t3 - 3 * t2 + 1
    h10 = t3 - 2 * t2 + theta
    h01 = -2 * t3 + 3 * t2
    h11 = t3 - t2
    return h00 * y0 + h10 * dt * f0 + h01 * y1 + h11 * dt * f1


@dataclass
class Trajectory:
    """Dense solution on [t0, t1] with the initial history before t0.

    ``history`` is a constant state or a callable of time.
    """

    t0: float
    dt: float
    states: np.ndarray  # (n_nodes, dimension)
    derivatives: np.ndarray
    history: object = field(repr=False)

    @property
    def t1(self) -> float:
        return self.t0 + self.dt * (self.states.shape[0] - 1)

    @property
    def times(self) -> np.ndarray:
        return self.t0 + self.dt * np.arange(self.states.shape[0])

    def history_at(self, t):
        if callable(self.history):
            return np.asarray(self.history(t), dtype=float)
        return np.asarray(self.history, dtype=float)

    def _interp(self, t, n_known):
        """State at time ``t`` using the first ``n_known`` nodes."""
        if t <= self.t0:
            return self.history_at(t)
        x = (t - self.t0) / self.dt
        nearest = int(round(x))
        if abs(x - nearest) < 1e-9 and nearest < n_known:
            return self.states[nearest]  # node times come back exactly
        k = int(np.floor(x))
        if k >= n_known - 1:
            raise ValueError(f"t={t} beyond the computed range")
        theta = x - k
        return _hermite(self.states[k], self.states[k + 1],
                        self.derivatives[k], self.derivatives[k + 1], theta, self.dt)

    def __call__(self, t):
        t = np.asarray(t, dtype=float)
        if t.ndim == 0:
            return self._interp(float(t), self.states.shape[0])
        return np.array([self._interp(float(s), self.states.shape[0]) for s in t])

    def tail(self, fraction: float):
        """(times, states) after dropping the first ``fraction`` of the run."""
        start = int(np.floor(fraction * (self.states.shape[0] - 1)))
        return self.times[start:], self.states[start:]

    def to_csv(self, path, columns=None, every: int = 1) -> None:
        d = self.states.shape[1]
        columns = list(columns) if columns else [f"x{i + 1}" for i in range(d)]
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(["t"] + columns)
            for t, y in zip(self.times[::every], self.states[::every]):
                writer.writerow([repr(float(t))] + [repr(float(v)) for v in y])


def integrate_dde(system: DdeSystem, history, t_end: float, dt: float,
                  t0: float = 0.0) -> Trajectory:
    """Classical RK4 over [t0, t_end] with Hermite lookups of delayed states."""
    if t_end <= t0:
        raise ValueError("t_end must exceed t0")
    if dt <= 0:
        raise ValueError("dt must be positive")
    positive = [d for d in system.delays if d > 0]
    if positive and dt > min(positive) * (1 + 1e-12):
        raise StepTooLarge(f"dt={dt} exceeds the shortest delay {min(positive)}")
    n_steps = int(np.ceil((t_end - t0) / dt - 1e-9))
    y0 = np.asarray(history(t0) if callable(history) else history, dtype=float)
    shape = y0.shape
    traj = Trajectory(t0, dt, np.empty((n_steps + 1,) + shape),
                      np.empty((n_steps + 1,) + shape), history)
    rhs, delays = system.rhs, system.delays

    def lagged(t, y_now, n_known):
        # zero delay means the current stage state
        return [y_now if d == 0 else traj._interp(t - d, n_known) for d in delays]

    traj.states[0] = y0
    traj.derivatives[0] = rhs(t0, y0, lagged(t0, y0, 1))
    for n in range(n_steps):
        t = t0 + n * dt
        y, k1 = traj.states[n], traj.derivatives[n]
        known = n + 1
        ya = y + 0.5 * dt * k1
        k2 = rhs(t + 0.5 * dt, ya, lagged(t + 0.5 * dt, ya, known))
        yb = y + 0.5 * dt * k2
        k3 = rhs(t + 0.5 * dt, yb, lagged(t + 0.5 * dt, yb, known))
        yc = y + dt * k3
        k4 = rhs(t + dt, yc, lagged(t + dt, yc, known))
        y_new = y + dt / 6.0 * (k1 + 2 * k2 + 2 * k3 + k4)
        if not np.all(np.isfinite(y_new)):
            raise NonFinite(f"state left the finite range at t={t + dt:g}")
        traj.states[n + 1] = y_new
        traj.derivatives[n + 1] = rhs(t + dt, y_new, lagged(t + dt, y_new, known + 1))
    return traj
