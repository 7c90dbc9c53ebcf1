"""Linearized phase-model DDE, used as an independent check of stability verdicts.

In time scaled by the delay, perturbations (U1, U2) of a locked solution obey

    U1' = -eta*a*U1 + eta*a*U2(s - 1)
    U2' = -eta*b*U2 + eta*b*U1(s - 1)

Constant equal perturbations (c, c) are the neutral shift along the locked
orbit. Every other mode shows up in U1 - U2 and in the derivatives, so their
norm grows or decays with the rightmost non-neutral root.
"""

from __future__ import annotations

import numpy as np

from .integrator import DdeSystem, Trajectory, integrate_dde


def linearized_system(a, b, eta) -> DdeSystem:
    """Batched over broadcastable arrays a, b, eta; state shape (2, *batch)."""
    ka = np.asarray(eta, dtype=float) * np.asarray(a, dtype=float)
    kb = np.asarray(eta, dtype=float) * np.asarray(b, dtype=float)

    def rhs(s, u, lagged):
        (u_del,) = lagged
        return np.stack([-ka * u[0] + ka * u_del[1], -kb * u[1] + kb * u_del[0]])

    return DdeSystem(2, [1.0], rhs)


def integrate_linearized(a, b, eta, history_perturbation, s_end: float = 60.0,
                         dt: float = 0.01) -> Trajectory:
    a, b, eta = np.broadcast_arrays(*(np.asarray(v, dtype=float) for v in (a, b, eta)))
    if np.any(eta <= 0):
        raise ValueError("eta must be positive")
    hist = np.asarray(history_perturbation, dtype=float)
    hist = np.broadcast_to(hist.reshape((2,) + (1,) * a.ndim), (2,) + a.shape).copy()
    return integrate_dde(linearized_system(a, b, eta), hist, s_end, dt)


def non_neutral_norm(traj: Trajectory) -> np.ndarray:
    """|(U1 - U2, U1', U2')| at every node; shape (n_nodes, *batch)."""
    u, du = traj.states, traj.derivatives
    return np.hypot(np.hypot(u[:, 0] - u[:, 1], du[:, 0]), du[:, 1])


def growth_rate(traj: Trajectory, skip: float = 0.5, rel_floor: float = 1e-11,
                ceiling: float = 1e250) -> np.ndarray:
    """Least-squares slope of log non_neutral_norm over the final part of the run.

    Only the leading stretch where the norm stays above ``rel_floor`` times the
    state size (rounding error of the neutral component) and below ``ceiling``
    is used.
    """
    norm = non_neutral_norm(traj)
    size = np.max(np.abs(traj.states[0]), axis=0)
    floor = (rel_floor * size).reshape(-1)
    s_all = traj.times
    flat = norm.reshape(norm.shape[0], -1)
    rates = np.empty(flat.shape[1])
    for k in range(flat.shape[1]):
        ok = (flat[:, k] > floor[k]) & (flat[:, k] < ceiling)
        n = flat.shape[0] if ok.all() else int(np.argmin(ok))
        n = max(n, 3)
        start = int(skip * (n - 1))
        s = s_all[start:n]
        logn = np.log(np.clip(flat[start:n, k], 1e-300, 1e300))
        s_c = s - s.mean()
        rates[k] = np.dot(s_c, logn - logn.mean()) / np.dot(s_c, s_c)
    return rates.reshape(norm.shape[1:])
