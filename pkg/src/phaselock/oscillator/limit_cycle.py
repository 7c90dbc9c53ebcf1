"""Detection of an attracting limit cycle by Poincare return."""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np
from scipy.integrate import solve_ivp
from scipy.interpolate import CubicSpline

from ..errors import DegenerateOrbit, NoConvergence
from .models import VectorField

DEFAULT_N_SAMPLES = 1024
_RTOL = 1e-11
_ATOL = 1e-12


@dataclass(frozen=True)
class LimitCycle:
    """Periodic orbit sampled at ``n_samples`` uniform phases on [0, 2*pi).

    ``period`` is in the time units of the unscaled vector field; in the phase
    variable the cycle solves ``x' = F(x) / Omega``.
    """

    samples: np.ndarray
    period: float

    @property
    def Omega(self) -> float:
        return 2 * np.pi / self.period

    @property
    def n_samples(self) -> int:
        return self.samples.shape[0]

    @property
    def dimension(self) -> int:
        return self.samples.shape[1]

    @property
    def phases(self) -> np.ndarray:
        return 2 * np.pi * np.arange(self.n_samples) / self.n_samples

    @cached_property
    def _spline(self) -> CubicSpline:
        closed = np.vstack([self.samples, self.samples[:1]])
        grid = np.append(self.phases, 2 * np.pi)
        return CubicSpline(grid, closed, axis=0, bc_type="periodic")

    def __call__(self, rho):
        """Periodic cubic interpolation of the cycle at phase(s) ``rho``."""
        return self._spline(np.mod(rho, 2 * np.pi))

    def shifted(self, k: int) -> "LimitCycle":
        """Same orbit with the phase origin moved forward by ``k`` samples."""
        return LimitCycle(np.roll(self.samples, -k, axis=0), self.period)

    def closure_defect(self) -> float:
        return float(np.max(np.abs(self(0.0) - self(2 * np.pi))))


def _integrate(vf, y0, t_end, **kw):
    return solve_ivp(lambda t, y: vf(y), (0.0, t_end), y0, method="DOP853",
                     rtol=_RTOL, atol=_ATOL, **kw)


def _poincare_return(vf, p, scale, t_guess, max_time):
    """First return of the flow from ``p`` to the hyperplane through ``p``
    normal to the flow, restricted to a neighbourhood of ``p``."""
    n = vf(p)
    n = n / np.linalg.norm(n)

    def section(t, y):
        return float(n @ (y - p))

    section.direction = 1.0
    # leave the section before arming the event
    t_skip = 1e-3 * t_guess
    window = 2.0 * t_guess
    while True:
        sol = _integrate(vf, p, t_skip + window, events=section, dense_output=True)
        if sol.status == -1:
            raise NoConvergence(f"integration failed: {sol.message}")
        for te, ye in zip(sol.t_events[0], sol.y_events[0]):
            if te > t_skip and np.linalg.norm(ye - p) < 0.25 * scale:
                return te, ye
        if window >= max_time:
            raise NoConvergence(f"no return to the section within t = {max_time:g}")
        window = min(2 * window, max_time)


def find_limit_cycle(vf: VectorField, guess, t_transient: float = 500.0, tol: float = 1e-9,
                     n_samples: int = DEFAULT_N_SAMPLES, max_time: float = 1e4,
                     max_returns: int = 200) -> LimitCycle:
    """Locate the attracting cycle reached from ``guess``.

    After the transient, successive Poincare returns are iterated until the
    return point moves by less than ``tol``; the last return time is the period.
    """
    if tol <= 0:
        raise ValueError("tol must be positive")
    y0 = np.asarray(guess, dtype=float)
    sol = _integrate(vf, y0, t_transient, dense_output=True)
    if sol.status == -1 or not np.all(np.isfinite(sol.y)):
        raise NoConvergence("transient integration failed")
    p = sol.y[:, -1]
    tail = sol.sol(np.linspace(0.5 * t_transient, t_transient, 2000)).T
    scale = float(np.linalg.norm(np.ptp(tail, axis=0)))
    if np.linalg.norm(vf(p)) < tol or scale < tol:
        raise DegenerateOrbit("trajectory settled on an equilibrium")

    t_guess = max(t_transient / 20.0, 1.0)
    period = None
    for _ in range(max_returns):
        te, ye = _poincare_return(vf, p, scale, t_guess if period is None else period, max_time)
        step = float(np.max(np.abs(ye - p)))
        p, period = ye, te
        if step < tol:
            break
        if step < tol * 1e3 and np.linalg.norm(vf(p)) < tol:
            raise DegenerateOrbit("return map collapsed onto an equilibrium")
    else:
        raise NoConvergence(f"return map not converged after {max_returns} returns")

    t = period * np.arange(n_samples) / n_samples
    res = _integrate(vf, p, period, t_eval=t)
    return LimitCycle(res.y.T.copy(), float(period))
