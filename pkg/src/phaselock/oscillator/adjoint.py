"""Periodic adjoint (infinitesimal phase response) of a limit cycle."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.integrate import solve_ivp

from ..errors import GridMismatch, NoConvergence
from .limit_cycle import LimitCycle
from .models import VectorField


@dataclass(frozen=True)
class AdjointSolution:
    """Adjoint ``Z`` on the sample grid of its limit cycle.

    Normalized against the phase-time field ``F/Omega`` that the cycle solves,
    so ``Z . dgamma/drho = 1`` along the orbit and ``Z`` is the phase gradient.
    """

    samples: np.ndarray

    @property
    def n_samples(self) -> int:
        return self.samples.shape[0]


def normalization_integral(vf: VectorField, lc: LimitCycle, adj: AdjointSolution) -> float:
    """(1/2pi) * integral of Z . F(gamma)/Omega over one period (trapezoid)."""
    if adj.n_samples != lc.n_samples:
        raise GridMismatch("adjoint and cycle sampled on different grids")
    flow = vf(lc.samples) / lc.Omega
    return float(np.mean(np.sum(adj.samples * flow, axis=1)))


def period_defect(adj: AdjointSolution, lc: LimitCycle, vf: VectorField) -> float:
    """Sup-norm mismatch between Z(0) and Z(2pi) after one backward period."""
    z_end = _backward_period(vf, lc, adj.samples[0])[0]
    return float(np.max(np.abs(z_end - adj.samples[0])))


def _backward_period(vf, lc, z_start):
    """Integrate dZ/drho = -(1/Omega) DF(gamma)^T Z from rho=2pi down to 0.

    Returns Z on the uniform grid (index 0 is rho=0) and Z at rho=0.
    """
    Om = lc.Omega

    def rhs(rho, z):
        return -(vf.jacobian(lc(rho)).T @ z) / Om

    grid = lc.phases
    sol = solve_ivp(rhs, (2 * np.pi, 0.0), z_start, method="DOP853",
                    t_eval=grid[::-1],
                    rtol=1e-11, atol=1e-13)
    if sol.status == -1:
        raise NoConvergence(f"adjoint integration failed: {sol.message}")
    # t_eval is decreasing: 2pi - h, ..., h, 0  ->  reverse to ascending
    values = sol.y.T[::-1]
    return values[0], values


def solve_adjoint(vf: VectorField, lc: LimitCycle, tol: float = 1e-8,
                  max_periods: int = 200) -> AdjointSolution:
    """Backward-iterate the adjoint over whole periods until it repeats.

    Backward in phase the adjoint contracts onto its unique periodic solution,
    because every non-trivial Floquet multiplier of the cycle is inside the
    unit circle. Each period is rescaled against the normalization so the
    neutral direction neither grows nor decays numerically.
    """
    flow = vf(lc.samples) / lc.Omega
    z = flow[0] / float(flow[0] @ flow[0])
    prev = None
    for _ in range(max_periods):
        z0, values = _backward_period(vf, lc, z)
        values = values / np.mean(np.sum(values * flow, axis=1))
        if prev is not None and np.max(np.abs(values - prev)) < tol:
            return AdjointSolution(values)
        prev = values
        z = values[0]
    raise NoConvergence(f"adjoint not periodic after {max_periods} periods")
