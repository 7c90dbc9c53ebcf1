"""Simulation of two delay-coupled oscillators and comparison with the phase model."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..errors import NoMatch, NotLocked
from ..oscillator.models import CouplingFunction, VectorField
from ..phasemodel import Kind, PhaseConfig
from .integrator import DdeSystem, Trajectory, integrate_dde

DEFAULT_PERIODS = 400
TRANSIENT_FRACTION = 0.6
SPREAD_TOL = 1e-3


def coupled_system(vf: VectorField, g: CouplingFunction, cfg: PhaseConfig) -> DdeSystem:
    """Pair of oscillators in phase time (natural period 2*pi):

        X_i' = F(X_i)/Omega + (epsilon/Omega) * G(X_i, X_j(rho - Omega*tau)).
    """
    if vf.dimension != g.dimension:
        raise ValueError("vector field and coupling differ in dimension")
    m, Om, k = vf.dimension, cfg.Omega, cfg.epsilon / cfg.Omega

    f, coupling = vf.rhs, g.g

    def rhs(t, x, lagged):
        # both oscillators in one batched call; row i is coupled to the other row's past
        pair = x.reshape(2, m)
        other = lagged[0].reshape(2, m)[::-1]
        return (f(pair) / Om + k * coupling(pair, other)).reshape(-1)

    return DdeSystem(2 * m, [cfg.Omega * cfg.tau], rhs)


def default_step(cfg: PhaseConfig) -> float:
    delay = cfg.Omega * cfg.tau
    return (min(delay, 2 * np.pi) if delay > 0 else 2 * np.pi) / 200


def simulate_full_coupled(vf: VectorField, g: CouplingFunction, cfg: PhaseConfig, history,
                          t_end: float | None = None, dt: float | None = None) -> Trajectory:
    history = np.asarray(history, dtype=float)
    if history.shape != (2 * vf.dimension,):
        raise ValueError(f"history needs {2 * vf.dimension} components")
    t_end = DEFAULT_PERIODS * 2 * np.pi if t_end is None else t_end
    dt = default_step(cfg) if dt is None else dt
    return integrate_dde(coupled_system(vf, g, cfg), history, t_end, dt)


def _peak_times(t, x):
    i = np.nonzero((x[1:-1] > x[:-2]) & (x[1:-1] >= x[2:]))[0] + 1
    y0, y1, y2 = x[i - 1], x[i], x[i + 1]
    denom = y0 - 2 * y1 + y2
    shift = np.where(denom != 0, 0.5 * (y0 - y2) / np.where(denom != 0, denom, 1), 0.0)
    dt = t[1] - t[0]
    return t[i] + shift * dt


def measure_period_and_phase(traj: Trajectory, component_pair=(0, None),
                             discard: float = TRANSIENT_FRACTION, spread_tol: float = SPREAD_TOL):
    """Period of component i and the lag of component j behind it, as a phase.

    ``component_pair`` defaults to the first variable of each oscillator.
    psi = 2*pi * (mean delay of j's peaks after i's peaks) / T, in [0, 2*pi).
    """
    i, j = component_pair
    if j is None:
        j = traj.states.shape[1] // 2
    t, y = traj.tail(discard)
    pi_, pj = _peak_times(t, y[:, i]), _peak_times(t, y[:, j])
    if pi_.size < 3 or pj.size < 2:
        raise NotLocked("too few oscillation peaks after the transient")
    intervals = np.diff(pi_)
    T = float(intervals.mean())
    spread = float((intervals.max() - intervals.min()) / T)
    if spread > spread_tol:
        raise NotLocked(f"inter-peak intervals spread by {spread:.2e} (> {spread_tol:g})")
    offsets = np.array([pj[np.searchsorted(pj, p) % pj.size] - p for p in pi_])
    angle = 2 * np.pi * offsets / T
    psi = float(np.mod(np.angle(np.mean(np.exp(1j * angle))), 2 * np.pi))
    if 2 * np.pi - psi < 1e-12:
        psi = 0.0
    return T, psi


def frequency_deviation(T_measured: float, epsilon: float) -> float:
    """(1/epsilon) * (2*pi/T - 1): slow frequency shift of a normalized oscillator."""
    if T_measured <= 0 or epsilon <= 0:
        raise ValueError("T_measured and epsilon must be positive")
    return (2 * np.pi / T_measured - 1.0) / epsilon


@dataclass(frozen=True)
class FullRun:
    tau: float
    kind: Kind
    omega_full: float


@dataclass(frozen=True)
class ComparisonRecord:
    tau: float
    psi_kind: Kind
    omega_phase: float
    omega_full: float

    @property
    def E_N(self) -> float:
        return (self.omega_phase - self.omega_full) / self.omega_full


def normalized_error(omega_phase: float, omega_full: float) -> float:
    return (omega_phase - omega_full) / omega_full


def classify_kind(psi: float, tol: float = 0.15) -> Kind:
    d0 = min(psi, 2 * np.pi - psi)
    if d0 < tol:
        return Kind.IN_PHASE
    if abs(psi - np.pi) < tol:
        return Kind.ANTI_PHASE
    return Kind.OUT_OF_PHASE


def compare(phase_solutions, full_runs, max_distance: float = 1.0):
    """Pair each full-model run with the nearest phase-model omega of the same
    delay and kind."""
    records = []
    for run in full_runs:
        pool = [s for s in phase_solutions
                if s.kind is run.kind and abs(s.tau - run.tau) < 1e-9]
        if not pool:
            raise NoMatch(f"no phase-model {run.kind.value} solution at tau={run.tau}")
        best = min(pool, key=lambda s: abs(s.omega - run.omega_full))
        if abs(best.omega - run.omega_full) > max_distance:
            raise NoMatch(f"nearest phase-model omega {best.omega:.6g} is more than "
                          f"{max_distance} from {run.omega_full:.6g} at tau={run.tau}")
        records.append(ComparisonRecord(run.tau, run.kind, best.omega, run.omega_full))
    return records
