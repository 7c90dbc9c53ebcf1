"""Locating pitchfork and saddle-node points along traced branches.

Three conditions mark candidate bifurcations of the delayed phase model:

* pitchfork of an in- or anti-phase solution: H'(psi - omega*eta - Omega*tau) = 0;
* fold of an in- or anti-phase solution: 1 + eta*H'(...)/Omega = 0;
* fold of an out-of-phase pair: a + b + 2*eta*a*b = 0, the determinant of the
  Jacobian of the two locking equations.

A pitchfork shows up as a sign change of H' inside a branch and is bracketed
by bisection. A fold ends (or starts) branches, so it is found by Newton on the
locking equations augmented with the fold condition, started from the branch
endpoint.
"""

from __future__ import annotations

import enum
import warnings
from dataclasses import dataclass

import numpy as np

from ..errors import AmbiguousEvent
from ..phasemodel import Kind, PhaseConfig, find_out_of_phase
from .branches import _circ

BISECT_TOL = 1e-8
EVENT_TOL = 1e-6
DEGENERATE_TOL = 1e-6
EDGE_PSI = 1e-4
CROSSCHECK_DELTA = 1e-3


class EventKind(str, enum.Enum):
    PITCHFORK = "Pitchfork"
    SADDLE_NODE_LOCKED = "SaddleNodeLocked"
    SADDLE_NODE_OUT_OF_PHASE = "SaddleNodeOutOfPhase"


@dataclass(frozen=True)
class BifurcationPoint:
    tau_star: float
    kind: EventKind
    psi_star: float
    omega_star: float
    residual: float
    flags: tuple = ()


def _c(omega, tau, cfg):
    return omega * cfg.epsilon * cfg.Omega * tau + cfg.Omega * tau


def _locked_residual(omega, psi, tau, cfg, h):
    return omega - h(psi - _c(omega, tau, cfg)) / cfg.Omega


def _locked_slope(omega, psi, tau, cfg, h):
    eta = cfg.epsilon * cfg.Omega * tau
    return 1 + eta * h.prime(psi - _c(omega, tau, cfg)) / cfg.Omega


def _track_omega(omega, psi, tau, cfg, h, iters=40):
    for _ in range(iters):
        step = _locked_residual(omega, psi, tau, cfg, h) / _locked_slope(omega, psi, tau, cfg, h)
        omega -= step
        if abs(step) < 1e-15 * max(1.0, abs(omega)):
            break
    return omega


def pitchfork_event(omega, psi, tau, cfg, h):
    return h.prime(psi - _c(omega, tau, cfg))


def saddle_node_locked_event(omega, psi, tau, cfg, h):
    return _locked_slope(omega, psi, tau, cfg, h)


def saddle_node_out_of_phase_event(omega, psi, tau, cfg, h):
    c = _c(omega, tau, cfg)
    eta = cfg.epsilon * cfg.Omega * tau
    a = h.prime(psi - c) / cfg.Omega
    b = h.prime(-psi - c) / cfg.Omega
    return a + b + 2 * eta * a * b


def _bisect_pitchfork(t0, w0, t1, w1, psi, cfg, h):
    e0 = pitchfork_event(w0, psi, t0, cfg, h)
    while t1 - t0 > BISECT_TOL:
        tm = 0.5 * (t0 + t1)
        wm = _track_omega(0.5 * (w0 + w1), psi, tm, cfg, h)
        em = pitchfork_event(wm, psi, tm, cfg, h)
        if np.sign(em) == np.sign(e0):
            t0, w0, e0 = tm, wm, em
        else:
            t1, w1 = tm, wm
    tau = 0.5 * (t0 + t1)
    omega = _track_omega(0.5 * (w0 + w1), psi, tau, cfg, h)
    return tau, omega


def _newton(x, fun, iters=50, h_fd=1e-7):
    for _ in range(iters):
        r = fun(x)
        J = np.empty((r.size, x.size))
        for j in range(x.size):
            dx = np.zeros_like(x)
            dx[j] = h_fd * max(1.0, abs(x[j]))
            J[:, j] = (fun(x + dx) - r) / dx[j]
        try:
            step = np.linalg.solve(J, -r)
        except np.linalg.LinAlgError:
            return None
        x = x + step
        if not np.all(np.isfinite(x)):
            return None
        if np.linalg.norm(step) < 1e-13 * max(1.0, np.linalg.norm(x)):
            break
    return x if np.linalg.norm(fun(x)) < 1e-10 else None


def _fold_locked(omega, psi, tau, cfg, h):
    def fun(x):
        return np.array([_locked_residual(x[0], psi, x[1], cfg, h),
                         _locked_slope(x[0], psi, x[1], cfg, h)])

    return _newton(np.array([omega, tau]), fun)


def _fold_out_of_phase(psi, omega, tau, cfg, h):
    def fun(x):
        p, w, t = x
        return np.array([_locked_residual(w, p, t, cfg, h),
                         _locked_residual(w, -p, t, cfg, h),
                         saddle_node_out_of_phase_event(w, p, t, cfg, h)])

    return _newton(np.array([psi, omega, tau]), fun)


def _fold_out_of_phase_seeded(sol, partners, tau, lo, hi, cfg, h):
    """Fold of an out-of-phase branch ending between ``lo`` and ``hi``.

    Near a fold psi moves like sqrt(tau - tau*), so the end point alone is a
    poor seed; the midpoint with a partner branch ending at the same delay on
    the same side of pi sits close to the fold. The search runs on psi in
    [0, pi] (the system is even in psi) and the answer is mirrored back.
    """
    mirrored = sol.psi > np.pi

    def half(p):
        p = float(np.mod(p, 2 * np.pi))
        return 2 * np.pi - p if p > np.pi else p

    psi0 = half(sol.psi)
    seeds = [(0.5 * (psi0 + half(q.psi)), 0.5 * (sol.omega + q.omega))
             for q in partners if q is not sol and (q.psi > np.pi) == mirrored]
    seeds.sort(key=lambda sw: np.hypot(sw[0] - psi0, sw[1] - sol.omega))
    seeds.append((psi0, sol.omega))
    for p, w in seeds:
        x = _fold_out_of_phase(p, w, tau, cfg, h)
        if x is None or not lo - 1e-9 <= x[2] <= hi + 1e-9:
            continue
        p = half(x[0])
        return np.array([2 * np.pi - p if mirrored else p, x[1], x[2]])
    return None


def _out_of_phase_near(branches, tau, psi, radius=0.5):
    count = 0
    for br in branches:
        if br.kind is not Kind.OUT_OF_PHASE:
            continue
        for t, s in br.points:
            if abs(t - tau) < 1e-9 and _circ(s.psi - psi) < radius:
                count += 1
    return count


def detect_bifurcations(branches, cfg_base: PhaseConfig, h, strict: bool = False):
    """Bifurcation points along ``branches`` produced by sweep_tau.

    Ambiguous steps (two conditions changing sign at once) are reported with
    an "ambiguous" flag and a warning, or raise AmbiguousEvent when ``strict``.
    """
    taus = sorted({t for br in branches for t, _ in br.points})
    if not taus:
        return []
    t_first, t_last = taus[0], taus[-1]
    step = taus[1] - taus[0] if len(taus) > 1 else 0.0
    events = []

    for br in branches:
        if br.kind is Kind.OUT_OF_PHASE:
            continue
        psi = br.points[0][1].psi
        for (t0, s0), (t1, s1) in zip(br.points[:-1], br.points[1:]):
            p0 = pitchfork_event(s0.omega, psi, t0, cfg_base, h)
            p1 = pitchfork_event(s1.omega, psi, t1, cfg_base, h)
            f0 = saddle_node_locked_event(s0.omega, psi, t0, cfg_base, h)
            f1 = saddle_node_locked_event(s1.omega, psi, t1, cfg_base, h)
            flip_p, flip_f = p0 * p1 < 0, f0 * f1 < 0
            flags = []
            if flip_p and flip_f:
                msg = f"pitchfork and fold conditions both change sign in tau=({t0}, {t1})"
                if strict:
                    raise AmbiguousEvent(msg)
                warnings.warn(msg, stacklevel=2)
                flags.append("ambiguous")
            if flip_p:
                tau, omega = _bisect_pitchfork(t0, s0.omega, t1, s1.omega, psi, cfg_base, h)
                res = abs(pitchfork_event(omega, psi, tau, cfg_base, h))
                x = psi - _c(omega, tau, cfg_base)
                fl = list(flags)
                if abs(h.third(x)) < DEGENERATE_TOL:
                    fl.append("degenerate")
                before = _out_of_phase_near(branches, _nearest(taus, tau - 2 * step), psi)
                after = _out_of_phase_near(branches, _nearest(taus, tau + 2 * step), psi)
                if abs(after - before) != 2:
                    # the new pair may leave the neighbourhood within two steps
                    delta = min(2 * step, CROSSCHECK_DELTA)
                    before = _resolve_near(cfg_base, h, tau - delta, psi)
                    after = _resolve_near(cfg_base, h, tau + delta, psi)
                if abs(after - before) != 2:
                    fl.append("unconfirmed")
                events.append(BifurcationPoint(tau, EventKind.PITCHFORK, psi, omega, res, tuple(fl)))
            if flip_f:
                x = _fold_locked(0.5 * (s0.omega + s1.omega), psi, 0.5 * (t0 + t1), cfg_base, h)
                if x is not None:
                    res = abs(saddle_node_locked_event(x[0], psi, x[1], cfg_base, h))
                    events.append(BifurcationPoint(float(x[1]), EventKind.SADDLE_NODE_LOCKED,
                                                   psi, float(x[0]), res, tuple(flags)))

    # out-of-phase branches that start or stop at the same delay, for fold seeds
    starts, stops = {}, {}
    for br in branches:
        if br.kind is Kind.OUT_OF_PHASE:
            starts.setdefault(br.points[0][0], []).append(br.points[0][1])
            stops.setdefault(br.points[-1][0], []).append(br.points[-1][1])

    for br in branches:
        ends = []
        (ts, ss), (te, se) = br.points[0], br.points[-1]
        if ts > t_first:
            ends.append((ts, ss, ts - step, ts, starts))
        if te < t_last:
            ends.append((te, se, te, te + step, stops))
        for t, s, lo, hi, partners in ends:
            if br.kind is Kind.OUT_OF_PHASE:
                x = _fold_out_of_phase_seeded(s, partners.get(t, []), t, lo, hi, cfg_base, h)
                if x is None:
                    continue
                psi = float(x[0])
                if min(_circ(psi), _circ(psi - np.pi)) < EDGE_PSI:
                    continue  # the branch ends on a pitchfork
                tau, omega, kind = float(x[2]), float(x[1]), EventKind.SADDLE_NODE_OUT_OF_PHASE
                res = abs(saddle_node_out_of_phase_event(omega, psi, tau, cfg_base, h))
            else:
                x = _fold_locked(s.omega, s.psi, t, cfg_base, h)
                if x is None:
                    continue
                psi, omega, tau = s.psi, float(x[0]), float(x[1])
                kind = EventKind.SADDLE_NODE_LOCKED
                res = abs(saddle_node_locked_event(omega, psi, tau, cfg_base, h))
            if not lo - 1e-9 <= tau <= hi + 1e-9:
                continue
            events.append(BifurcationPoint(tau, kind, psi, omega, res))

    return _dedupe(events)


def _resolve_near(cfg_base, h, tau, psi, radius=0.5):
    sols = find_out_of_phase(cfg_base.with_tau(tau), h)
    return sum(1 for s in sols if _circ(s.psi - psi) < radius)


def _nearest(taus, t):
    i = int(np.argmin(np.abs(np.asarray(taus) - t)))
    return taus[i]


def _dedupe(events):
    events = sorted(events, key=lambda e: (e.tau_star, e.kind.value, e.psi_star, e.omega_star))
    out = []
    for e in events:
        if any(o.kind is e.kind and abs(o.tau_star - e.tau_star) < 1e-6
               and _circ(o.psi_star - e.psi_star) < 1e-5
               and abs(o.omega_star - e.omega_star) < 1e-4 for o in out):
            continue
        out.append(e)
    return out
