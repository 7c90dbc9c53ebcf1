"""Solution branches traced across a sweep of the delay."""

from __future__ import annotations

import warnings
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from functools import partial

import numpy as np

from ..errors import DegenerateContinuum
from ..phasemodel import (
    Kind,
    PhaseConfig,
    find_locked_frequencies,
    find_out_of_phase,
    small_delay_solutions,
)

MATCH_FLOOR = 1e-3
MATCH_FACTOR = 10.0


@dataclass
class Branch:
    """Solutions of one kind at consecutive delays, in increasing tau."""

    kind: Kind
    points: list = field(default_factory=list)  # (tau, PhaseLockedSolution)

    @property
    def taus(self):
        return np.array([t for t, _ in self.points])

    @property
    def psis(self):
        return np.array([s.psi for _, s in self.points])

    @property
    def omegas(self):
        return np.array([s.omega for _, s in self.points])

    def __len__(self):
        return len(self.points)


def tau_grid(tau_range, step):
    lo, hi = map(float, tau_range)
    if not lo < hi:
        raise ValueError("tau range must be increasing")
    if step <= 0:
        raise ValueError("step must be positive")
    n = int(np.floor((hi - lo) / step + 1e-9))
    return lo + step * np.arange(n + 1)


def _circ(d):
    return abs((d + np.pi) % (2 * np.pi) - np.pi)


def _distance(p, q):
    return float(np.hypot(_circ(p[0] - q[0]), p[1] - q[1]))


def _tangent(sol, cfg, h):
    """(dpsi/dtau, domega/dtau) from the implicit function theorem."""
    eps, Om = cfg.epsilon, cfg.Omega
    grow = sol.omega * eps + 1.0  # d(omega*eta + Omega*tau)/dtau / Omega
    a, b, eta = sol.a, sol.b, cfg.eta
    if sol.kind is Kind.OUT_OF_PHASE:
        J = np.array([[-a, 1 + eta * a], [b, 1 + eta * b]])
        rhs = -Om * grow * np.array([a, b])
        try:
            return np.linalg.solve(J, rhs)
        except np.linalg.LinAlgError:
            return np.array([np.inf, np.inf])
    d = 1 + eta * a
    return np.array([0.0, -Om * grow * a / d if d != 0 else np.inf])


def _solve_at(tau, cfg_base, h, model, n_samples, grid):
    """Solutions at one delay; a continuum of out-of-phase states is left out
    with a warning, since it cannot be traced as isolated branches."""
    cfg = cfg_base.with_tau(tau)
    try:
        if model == "small":
            return cfg, small_delay_solutions(cfg, h, n_samples)
        rest = find_out_of_phase(cfg, h, grid)
    except DegenerateContinuum as exc:
        warnings.warn(f"tau={tau:g}: {exc}; only psi = 0 and pi are kept", stacklevel=2)
        if model == "small":
            return cfg, small_delay_solutions(cfg, h, n_samples, on_continuum="skip")
        rest = []
    sols = (find_locked_frequencies(0.0, cfg, h, n_samples)
            + find_locked_frequencies(np.pi, cfg, h, n_samples) + rest)
    return cfg, sols


def link(branches_active, sols, tau, step, cfg, h):
    """Greedy nearest-neighbour assignment of new solutions to live branches.

    Returns (continued, new) branch lists.
    """
    candidates = []
    for bi, br in enumerate(branches_active):
        t_last, last = br.points[-1]
        here = np.array([last.psi, last.omega])
        tangent = step * _tangent(last, cfg.with_tau(t_last), h)
        scales = [float(np.hypot(*tangent))]
        drift = tangent
        if len(br) >= 2:
            # secant prediction; the threshold also remembers the step before,
            # so a branch passing through a turning point in omega stays linked
            pts = [np.array([s.psi, s.omega]) for _, s in br.points[-3:]]
            steps = [q - p for p, q in zip(pts[:-1], pts[1:])]
            for d in steps:
                d[0] = (d[0] + np.pi) % (2 * np.pi) - np.pi
            drift = steps[-1]
            scales += [float(np.hypot(*d)) for d in steps]
        if not all(np.isfinite(scales)):
            drift = np.zeros(2) if not np.all(np.isfinite(drift)) else drift
            threshold = np.inf
        else:
            threshold = max(MATCH_FACTOR * max(scales), MATCH_FLOOR)
        predicted = here + drift
        for si, s in enumerate(sols):
            if s.kind is not br.kind:
                continue
            d = _distance(predicted, (s.psi, s.omega))
            if d <= threshold:
                candidates.append((d, bi, si))
    candidates.sort()
    used_b, used_s = set(), set()
    for _, bi, si in candidates:
        if bi in used_b or si in used_s:
            continue
        used_b.add(bi)
        used_s.add(si)
        branches_active[bi].points.append((tau, sols[si]))
    continued = [br for i, br in enumerate(branches_active) if i in used_b]
    new = [Branch(s.kind, [(tau, s)]) for i, s in enumerate(sols) if i not in used_s]
    return continued, new


def sweep_tau(tau_range, step, cfg_base: PhaseConfig, h, model: str = "delay",
              n_samples: int = 4096, grid=(256, 256), workers: int = 1):
    """Solve at every delay on a uniform grid and link solutions into branches.

    ``model`` is "delay" for the full delayed phase model or "small" for the
    model in which the delay only shifts the phase. With ``workers`` > 1 the
    per-delay solves run in separate processes; linking stays sequential, so
    the result does not depend on scheduling.
    """
    if model not in ("delay", "small"):
        raise ValueError("model must be 'delay' or 'small'")
    taus = [float(t) for t in tau_grid(tau_range, step)]
    solve = partial(_solve_at, cfg_base=cfg_base, h=h, model=model,
                    n_samples=n_samples, grid=grid)
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(solve, taus, chunksize=max(1, len(taus) // (4 * workers))))
    else:
        results = map(solve, taus)
    all_branches, active = [], []
    for tau, (cfg, sols) in zip(taus, results):
        active, new = link(active, sols, tau, step, cfg, h)
        all_branches.extend(new)
        active = active + new
    all_branches.sort(key=lambda br: (br.points[0][0], br.kind.value,
                                      br.points[0][1].psi, br.points[0][1].omega))
    return all_branches
